#pragma once

// Objective evaluation: ordinary SMML, entropic SMML, the per-cell quantity
// A_{j,tau}, the profiled objective with optimal assertion probabilities,
// the worst-case codelength, Renyi entropy, escort distributions, and
// redundancy above the Renyi floor. Units are nats throughout.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "codebook.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace esmml {

enum class Criterion { ordinary, entropic, worst_case, regret_entropic };

struct CriterionSpec {
    Criterion kind = Criterion::ordinary;
    double tau = 0.0;  // meaningful only for entropic / regret_entropic

    static CriterionSpec ordinary() { return {Criterion::ordinary, 0.0}; }
    static CriterionSpec entropic(double tau) {
        require_tau(tau);
        return {Criterion::entropic, tau};
    }
    static CriterionSpec worst_case() { return {Criterion::worst_case, 0.0}; }
    static CriterionSpec regret_entropic(double tau) {
        require_tau(tau);
        return {Criterion::regret_entropic, tau};
    }

    bool has_tau() const {
        return kind == Criterion::entropic || kind == Criterion::regret_entropic;
    }

    std::string name() const {
        switch (kind) {
            case Criterion::ordinary: return "ordinary";
            case Criterion::entropic: return "entropic";
            case Criterion::worst_case: return "worstcase";
            case Criterion::regret_entropic: return "regret_entropic";
        }
        return "?";
    }

  private:
    static void require_tau(double tau) {
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw std::invalid_argument("CriterionSpec: tau must be finite and positive");
    }
};

inline double ordinary_objective(const Codebook& cb, const Model& m, const PriorPredictive& r) {
    double acc = 0.0;
    for (int x = 0; x < m.support_size; ++x)
        acc += std::exp(r.log_r[x]) * two_part_codelength(cb, m, x);
    return acc;
}

inline double entropic_objective(const Codebook& cb, const Model& m, const PriorPredictive& r,
                                 double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("entropic_objective: tau must be positive");
    std::vector<double> terms(m.support_size);
    for (int x = 0; x < m.support_size; ++x)
        terms[x] = r.log_r[x] + tau * two_part_codelength(cb, m, x);
    return log_sum_exp(terms) / tau;
}

// log A_{j,tau}(theta) over one cell; +inf when theta cannot encode some
// cell member (infeasible codepoint), which is a value, not an error.
inline double cell_A(const Model& m, const PriorPredictive& r, const Cell& cell, double theta,
                     double tau) {
    std::vector<double> terms;
    terms.reserve(cell.hi - cell.lo);
    for (int x = cell.lo; x < cell.hi; ++x) {
        const double lp = log_pmf(m, x, theta);
        if (lp == neg_inf) return pos_inf;
        terms.push_back(r.log_r[x] - tau * lp);
    }
    return log_sum_exp(terms);
}

// Profiled objective after analytic elimination of q:
// value = ((1+tau)/tau) log sum_j A_j^{1/(1+tau)}, with the optimal
// log q_j = log A_j / (1+tau) - log sum_l A_l^{1/(1+tau)}.
inline std::pair<double, std::vector<double>> profiled_objective(
    const Model& m, const PriorPredictive& r, const Partition& part,
    const std::vector<double>& codepoints, double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("profiled_objective: tau must be positive");
    if (part.cells.size() != codepoints.size())
        throw std::invalid_argument("profiled_objective: codepoint count mismatch");
    std::vector<double> scaled(part.cells.size());
    for (std::size_t j = 0; j < part.cells.size(); ++j) {
        const double la = cell_A(m, r, part.cells[j], codepoints[j], tau);
        if (la == pos_inf)
            throw std::invalid_argument("profiled_objective: infeasible codepoint for cell " +
                                        std::to_string(j));
        scaled[j] = la / (1.0 + tau);
    }
    const double z = log_sum_exp(scaled);
    std::vector<double> log_q(scaled.size());
    for (std::size_t j = 0; j < scaled.size(); ++j) log_q[j] = scaled[j] - z;
    return {(1.0 + tau) / tau * z, log_q};
}

inline std::pair<double, int> worst_case_codelength(const Codebook& cb, const Model& m,
                                                    const PriorPredictive&) {
    double best = neg_inf;
    int arg = 0;
    for (int x = 0; x < m.support_size; ++x) {
        const double len = two_part_codelength(cb, m, x);
        if (len > best) {
            best = len;
            arg = x;
        }
    }
    return {best, arg};
}

inline double renyi_entropy(const PriorPredictive& r, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("renyi_entropy: alpha must lie in (0,1)");
    std::vector<double> terms(r.log_r.size());
    for (std::size_t x = 0; x < r.log_r.size(); ++x) terms[x] = alpha * r.log_r[x];
    return log_sum_exp(terms) / (1.0 - alpha);
}

inline std::vector<double> escort_distribution(const PriorPredictive& r, double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("escort_distribution: tau must be positive");
    const double alpha = 1.0 / (1.0 + tau);
    std::vector<double> scaled(r.log_r.size());
    for (std::size_t x = 0; x < r.log_r.size(); ++x) scaled[x] = alpha * r.log_r[x];
    const double z = log_sum_exp(scaled);
    std::vector<double> q(scaled.size());
    for (std::size_t x = 0; x < scaled.size(); ++x) q[x] = std::exp(scaled[x] - z);
    return q;
}

inline double smml_redundancy(const Codebook& cb, const Model& m, const PriorPredictive& r,
                              double tau) {
    return entropic_objective(cb, m, r, tau) - renyi_entropy(r, 1.0 / (1.0 + tau));
}

}  // namespace esmml
