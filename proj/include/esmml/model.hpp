#pragma once

// Finite-support canonical exponential family, its binomial instance, and
// Beta-prior predictive distributions. log p_n(x|theta) is
// log h(x) + eta(theta) T(x) - n A(eta(theta)); boundary mean parameters are
// admitted with the 0 log 0 = 0 convention, so log p can be 0 or -inf there.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace esmml {

struct Model {
    int support_size = 0;
    int n_trials = 0;
    std::vector<double> log_h;
    std::vector<double> t_stat;
    std::function<double(double)> log_partition;   // nu -> A(nu)
    std::function<double(double)> mean_map;        // nu -> A'(nu)
    std::function<double(double)> natural_param;   // theta -> eta(theta)
    double param_lo = 0.0;
    double param_hi = 1.0;
};

inline double log_pmf(const Model& m, int x, double theta) {
    if (x < 0 || x >= m.support_size)
        throw std::invalid_argument("log_pmf: x outside support");
    if (theta < m.param_lo || theta > m.param_hi)
        throw std::invalid_argument("log_pmf: theta outside param_bounds");
    if (theta == m.param_lo || theta == m.param_hi) {
        // degenerate member: all mass on the point with T(x) = n * theta
        return m.t_stat[x] == m.n_trials * theta ? 0.0 : neg_inf;
    }
    const double nu = m.natural_param(theta);
    return m.log_h[x] + nu * m.t_stat[x] - m.n_trials * m.log_partition(nu);
}

// codelength of the maximum-likelihood fit theta_hat(x) = x/n
inline double log_ml_pmf(const Model& m, int x) {
    if (x < 0 || x >= m.support_size)
        throw std::invalid_argument("log_ml_pmf: x outside support");
    const double n = m.n_trials;
    return m.log_h[x] + xlogy(x, x / n) + xlogy(n - x, 1.0 - x / n);
}

inline Model make_binomial(int n_trials) {
    if (n_trials < 1) throw std::invalid_argument("make_binomial: n_trials must be >= 1");
    Model m;
    m.support_size = n_trials + 1;
    m.n_trials = n_trials;
    m.log_h.resize(m.support_size);
    m.t_stat.resize(m.support_size);
    for (int x = 0; x <= n_trials; ++x) {
        m.log_h[x] = log_choose(n_trials, x);
        m.t_stat[x] = static_cast<double>(x);
    }
    m.log_partition = [](double nu) { return log1p_exp(nu); };
    m.mean_map = [](double nu) { return sigmoid(nu); };
    m.natural_param = [](double theta) { return std::log(theta) - std::log1p(-theta); };
    m.param_lo = 0.0;
    m.param_hi = 1.0;
    return m;
}

struct PriorPredictive {
    std::vector<double> log_r;
    double prior_a = 1.0;
    double prior_b = 1.0;
};

inline PriorPredictive beta_binomial_predictive(const Model& m, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta_binomial_predictive: shapes must be positive");
    PriorPredictive r;
    r.prior_a = a;
    r.prior_b = b;
    r.log_r.resize(m.support_size);
    if (a == 1.0 && b == 1.0) {
        const double v = -std::log(static_cast<double>(m.support_size));
        for (auto& e : r.log_r) e = v;
        return r;
    }
    const double n = m.n_trials;
    for (int x = 0; x < m.support_size; ++x)
        r.log_r[x] = m.log_h[x] + log_beta(x + a, n - x + b) - log_beta(a, b);
    return r;
}

}  // namespace esmml
