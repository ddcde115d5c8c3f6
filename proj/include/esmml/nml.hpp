#pragma once

// Shtarkov sum, the NML distribution, regret profiles of coding
// distributions and codebooks, and the regret-entropic objective.

#include <stdexcept>
#include <vector>

#include "codebook.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace esmml {

struct RegretProfile {
    std::vector<double> log_Q;   // coding distribution (possibly sub-probability)
    std::vector<double> regret;  // R_Q(x) = -log Q(x) + log p_n(x | x/n)
    double sup_regret = 0.0;
};

inline double shtarkov_sum(const Model& m) {
    std::vector<double> terms(m.support_size);
    for (int x = 0; x < m.support_size; ++x) terms[x] = log_ml_pmf(m, x);
    return log_sum_exp(terms);
}

inline RegretProfile regret_profile(const Model& m, const std::vector<double>& log_Q) {
    if (static_cast<int>(log_Q.size()) != m.support_size)
        throw std::invalid_argument("regret_profile: size mismatch");
    RegretProfile p;
    p.log_Q = log_Q;
    p.regret.resize(m.support_size);
    p.sup_regret = neg_inf;
    for (int x = 0; x < m.support_size; ++x) {
        p.regret[x] = -log_Q[x] + log_ml_pmf(m, x);
        if (p.regret[x] > p.sup_regret) p.sup_regret = p.regret[x];
    }
    return p;
}

inline RegretProfile nml_distribution(const Model& m) {
    const double log_s = shtarkov_sum(m);
    std::vector<double> log_Q(m.support_size);
    for (int x = 0; x < m.support_size; ++x) log_Q[x] = log_ml_pmf(m, x) - log_s;
    return regret_profile(m, log_Q);
}

// J_{n,tau}(Q) = (1/tau) log sum_x mu(x) e^{tau R_Q(x)}
inline double regret_entropic(const RegretProfile& profile, const std::vector<double>& log_mu,
                              double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("regret_entropic: tau must be positive");
    if (log_mu.size() != profile.regret.size())
        throw std::invalid_argument("regret_entropic: size mismatch");
    std::vector<double> terms(profile.regret.size());
    for (std::size_t x = 0; x < terms.size(); ++x)
        terms[x] = log_mu[x] + tau * profile.regret[x];
    return log_sum_exp(terms) / tau;
}

inline RegretProfile codebook_regret(const Codebook& cb, const Model& m) {
    std::vector<double> log_Q(m.support_size);
    for (int x = 0; x < m.support_size; ++x) log_Q[x] = -two_part_codelength(cb, m, x);
    return regret_profile(m, log_Q);
}

}  // namespace esmml
