#pragma once

// Log-space primitives shared by every module. All reductions are
// log-sum-exp with max subtraction and a fixed left-to-right order so
// results do not depend on scheduling.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace esmml {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// log(1 + e^x) without overflow for |x| up to ~700
inline double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// x * log(y) with the 0 log 0 = 0 convention
inline double xlogy(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(y);
}

inline double log_add_exp(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(const double* v, std::size_t n) {
    double m = neg_inf;
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] > m) m = v[i];
    if (m == neg_inf || m == pos_inf) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& v) {
    return log_sum_exp(v.data(), v.size());
}

inline double log_choose(int n, int x) {
    return std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Portable deterministic uniforms on top of a 64-bit state; the standard
// distributions are implementation-defined, which would break pinned tests.
struct rng {
    std::uint64_t state;

    explicit rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift64*
        std::uint64_t x = state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    int uniform_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // symmetric Dirichlet(1) via normalized exponentials
    std::vector<double> dirichlet(std::size_t k) {
        std::vector<double> w(k);
        double s = 0.0;
        for (auto& v : w) {
            double u;
            do { u = u01(); } while (u <= 0.0);
            v = -std::log(u);
            s += v;
        }
        for (auto& v : w) v /= s;
        return w;
    }
};

}  // namespace esmml
