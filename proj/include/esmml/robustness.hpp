#pragma once

// Variational machinery: exponentially tilted measures, KL divergence with
// the 0 log 0 = 0 convention, the Donsker-Varadhan inner value, the Gibbs
// decomposition, and the PAC-Bayes gap.

#include <stdexcept>
#include <string>
#include <vector>

#include "codebook.hpp"
#include "criteria.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace esmml {

struct TiltedMeasure {
    std::vector<double> log_s;
    std::string reference;  // identifier of the r_n it tilts
};

// KL(s||r) on log vectors; +inf where s charges a point r does not.
inline double kl_divergence(const std::vector<double>& log_s, const std::vector<double>& log_r) {
    if (log_s.size() != log_r.size())
        throw std::invalid_argument("kl_divergence: size mismatch");
    double acc = 0.0;
    for (std::size_t x = 0; x < log_s.size(); ++x) {
        if (log_s[x] == neg_inf) continue;  // 0 log 0 = 0
        if (log_r[x] == neg_inf) return pos_inf;
        acc += std::exp(log_s[x]) * (log_s[x] - log_r[x]);
    }
    return acc < 0.0 ? 0.0 : acc;
}

inline double kl_divergence(const TiltedMeasure& s, const PriorPredictive& r) {
    return kl_divergence(s.log_s, r.log_r);
}

inline TiltedMeasure optimal_tilt(const Codebook& cb, const Model& m, const PriorPredictive& r,
                                  double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("optimal_tilt: tau must be positive");
    TiltedMeasure s;
    s.reference = "r_n";
    s.log_s.resize(m.support_size);
    for (int x = 0; x < m.support_size; ++x)
        s.log_s[x] = r.log_r[x] + tau * two_part_codelength(cb, m, x);
    const double log_z = log_sum_exp(s.log_s);
    for (auto& v : s.log_s) v -= log_z;
    return s;
}

// Inner value of the variational representation: E_s[Lambda] - KL(s||r)/tau.
inline double variational_value(const Codebook& cb, const Model& m, const PriorPredictive& r,
                                double tau, const TiltedMeasure& s) {
    if (!(tau > 0.0)) throw std::invalid_argument("variational_value: tau must be positive");
    double mean = 0.0;
    for (int x = 0; x < m.support_size; ++x) {
        if (s.log_s[x] == neg_inf) continue;
        mean += std::exp(s.log_s[x]) * two_part_codelength(cb, m, x);
    }
    return mean - kl_divergence(s.log_s, r.log_r) / tau;
}

inline double pac_bayes_gap(const Codebook& cb, const Model& m, const PriorPredictive& r,
                            double tau, const TiltedMeasure& s) {
    return entropic_objective(cb, m, r, tau) - variational_value(cb, m, r, tau, s);
}

}  // namespace esmml
