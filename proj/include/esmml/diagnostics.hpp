#pragma once

// Joint n-tau regime sweeps and the consolidated invariant suite. The sweep
// fixes the ordinary SMML codebook per n and evaluates mean, entropic(tau_n),
// and sup codelengths on it. The suite executes the provable module-level
// invariants with a seeded deterministic RNG; failures are reported as data
// with worst-case violation magnitudes, never thrown.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "codebook.hpp"
#include "criteria.hpp"
#include "model.hpp"
#include "nml.hpp"
#include "numerics.hpp"
#include "optimize.hpp"
#include "robustness.hpp"

namespace esmml {

struct Schedule {
    enum class Kind { constant, c_over_log_n, c_log_n, c_log2_n };
    Kind kind = Kind::constant;
    double c = 1.0;

    double tau(int n) const {
        const double ln = std::log(static_cast<double>(n));
        switch (kind) {
            case Kind::constant: return c;
            case Kind::c_over_log_n: return c / ln;
            case Kind::c_log_n: return c * ln;
            case Kind::c_log2_n: return c * ln * ln;
        }
        return c;
    }

    std::string name() const {
        switch (kind) {
            case Kind::constant: return "constant";
            case Kind::c_over_log_n: return "c_over_log_n";
            case Kind::c_log_n: return "c_log_n";
            case Kind::c_log2_n: return "c_log2_n";
        }
        return "?";
    }

    // accepts "name:param"; underscore-free spellings are tolerated
    static Schedule parse(const std::string& text) {
        const auto colon = text.find(':');
        std::string name = colon == std::string::npos ? text : text.substr(0, colon);
        Schedule s;
        if (name == "constant")
            s.kind = Kind::constant;
        else if (name == "c_over_log_n" || name == "c_over_logn")
            s.kind = Kind::c_over_log_n;
        else if (name == "c_log_n" || name == "c_logn")
            s.kind = Kind::c_log_n;
        else if (name == "c_log2_n" || name == "c_log2n")
            s.kind = Kind::c_log2_n;
        else
            throw std::invalid_argument("unknown schedule: " + name);
        if (colon != std::string::npos) {
            const std::string param = text.substr(colon + 1);
            try {
                std::size_t used = 0;
                s.c = std::stod(param, &used);
                if (used != param.size()) throw std::invalid_argument(param);
            } catch (...) {
                throw std::invalid_argument("bad schedule parameter: " + param);
            }
        }
        if (!(s.c > 0.0)) throw std::invalid_argument("schedule parameter must be positive");
        return s;
    }
};

struct RegimeRecord {
    int n = 0;
    double tau = 0.0;
    double I = 0.0;
    double mean = 0.0;
    double sup = 0.0;
    double gap_mean = 0.0;
    double gap_sup = 0.0;
};

struct RegimeSweep {
    Schedule schedule;
    std::vector<RegimeRecord> records;
};

inline RegimeSweep run_regime_sweep(const Schedule& schedule, const std::vector<int>& ns,
                                    double prior_a, double prior_b, int spec_k /* 0 = auto */,
                                    const SolverConfig& cfg = {}) {
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
        if (ns[i + 1] <= ns[i]) throw std::invalid_argument("run_regime_sweep: ns must increase");
    RegimeSweep sweep;
    sweep.schedule = schedule;
    for (const int n : ns) {
        if (n < 2) throw std::invalid_argument("run_regime_sweep: n must be >= 2");
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, prior_a, prior_b);
        const FitResult fit = fit_codebook(m, r, CriterionSpec::ordinary(), spec_k, cfg);
        RegimeRecord rec;
        rec.n = n;
        rec.tau = schedule.tau(n);
        rec.mean = ordinary_objective(fit.codebook, m, r);
        rec.I = entropic_objective(fit.codebook, m, r, rec.tau);
        rec.sup = worst_case_codelength(fit.codebook, m, r).first;
        rec.gap_mean = rec.I - rec.mean;
        rec.gap_sup = rec.sup - rec.I;
        sweep.records.push_back(rec);
    }
    return sweep;
}

struct InvariantResult {
    std::string name;
    bool pass = true;
    double violation = 0.0;  // worst excess over the check's tolerance; <= 0 means pass
};

struct InvariantReport {
    std::vector<InvariantResult> results;

    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

// random codebook with interior codepoints; every cell is encodable
inline Codebook random_codebook(const Model& m, rng& gen, int max_k = 6) {
    const int N = m.support_size;
    const int k = gen.uniform_int(1, std::min(max_k, N));
    std::vector<int> cuts{0, N};
    while (static_cast<int>(cuts.size()) < k + 1) {
        const int c = gen.uniform_int(1, N - 1);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    Codebook cb;
    for (int j = 0; j < k; ++j) {
        cb.partition.cells.push_back({cuts[j], cuts[j + 1]});
        cb.codepoints.push_back(gen.uniform(0.02, 0.98));
    }
    const auto q = gen.dirichlet(k);
    for (const double v : q) cb.log_q.push_back(std::log(v));
    return cb;
}

// Codebook-invariant violation magnitude: q off the simplex, non-finite
// log q, or a cell member its codepoint cannot encode. Exposed separately so
// negative controls can feed corrupted codebooks through the same check the
// suite uses.
inline double codebook_invariant_violation(const Codebook& cb, const Model& m) {
    double viol = neg_inf;
    validate_partition(cb.partition, m.support_size);
    const double mass_err = std::abs(std::exp(log_sum_exp(cb.log_q)) - 1.0);
    viol = std::max(viol, mass_err - 1e-10);
    for (const double lq : cb.log_q)
        if (!std::isfinite(lq)) viol = std::max(viol, pos_inf);
    for (std::size_t j = 0; j < cb.partition.cells.size(); ++j)
        for (int x = cb.partition.cells[j].lo; x < cb.partition.cells[j].hi; ++x)
            if (log_pmf(m, x, cb.codepoints[j]) == neg_inf) viol = std::max(viol, pos_inf);
    return viol;
}

namespace detail {

struct SuiteContext {
    std::vector<int> sizes;
    rng gen;
    SolverConfig cfg;
    InvariantReport report;

    void record(const std::string& name, double violation) {
        report.results.push_back({name, violation <= 0.0, violation});
    }
};

// independent Simpson quadrature of the Beta-binomial predictive through the
// substitution theta = sin^2(u), which removes the endpoint singularities
inline double predictive_quadrature(const Model& m, int x, double a, double b) {
    const int intervals = 20000;
    const double h = (M_PI / 2.0) / intervals;
    const double log_norm = m.log_h[x] - log_beta(a, b);
    const auto f = [&](double u) {
        const double s = std::sin(u), c = std::cos(u);
        // integrand theta^(x+a-1) (1-theta)^(n-x+b-1) dtheta with dtheta = 2 s c du
        const double lg =
            xlogy(x + a - 0.5, s * s) + xlogy(m.n_trials - x + b - 0.5, c * c);
        return std::exp(log_norm + lg + std::log(2.0));
    };
    double acc = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(i * h);
    }
    return acc * h / 3.0;
}

inline void check_model(SuiteContext& ctx) {
    double norm_viol = neg_inf, mono_viol = neg_inf, quad_viol = neg_inf;
    for (const int n : ctx.sizes) {
        const Model m = make_binomial(n);
        for (const double theta : {0.07, 0.3, 0.5, 0.92}) {
            std::vector<double> lp(m.support_size);
            for (int x = 0; x < m.support_size; ++x) lp[x] = log_pmf(m, x, theta);
            norm_viol = std::max(norm_viol, std::abs(std::exp(log_sum_exp(lp)) - 1.0) - 1e-10);
        }
        for (const auto& [a, b] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {0.5, 0.5}}) {
            const PriorPredictive r = beta_binomial_predictive(m, a, b);
            norm_viol = std::max(norm_viol, std::abs(std::exp(log_sum_exp(r.log_r)) - 1.0) - 1e-10);
            if (n <= 20) {
                for (int x = 0; x < m.support_size; ++x) {
                    const double q = predictive_quadrature(m, x, a, b);
                    quad_viol = std::max(quad_viol, std::abs(std::exp(r.log_r[x]) - q) - 1e-8);
                }
            }
        }
        double prev = neg_inf;
        for (double nu = -30.0; nu <= 30.0; nu += 0.5) {
            const double v = m.mean_map(nu);
            if (prev != neg_inf) mono_viol = std::max(mono_viol, prev - v);
            prev = v;
        }
    }
    ctx.record("model: pmf and predictive normalization (1e-10)", norm_viol);
    ctx.record("model: mean map strictly increasing", mono_viol);
    ctx.record("model: predictive matches quadrature (1e-8)", quad_viol);
}

inline void check_codebook(SuiteContext& ctx) {
    double regret_viol = neg_inf, invariant_viol = neg_inf, reassign_viol = neg_inf,
           boundary_viol = neg_inf;
    for (const int n : ctx.sizes) {
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            const Codebook cb = random_codebook(m, ctx.gen);
            invariant_viol = std::max(invariant_viol, codebook_invariant_violation(cb, m));
            for (int x = 0; x < m.support_size; ++x) {
                const double reg = two_part_codelength(cb, m, x) - (-log_ml_pmf(m, x));
                regret_viol = std::max(regret_viol, -reg - 1e-12);
            }
            // pointwise reassignment never increases the entropic objective at fixed (q, theta)
            const auto assigned = assign_partition(m, cb.codepoints, cb.log_q);
            const Codebook re{assigned.partition, assigned.codepoints, assigned.log_q};
            invariant_viol = std::max(invariant_viol, codebook_invariant_violation(re, m));
            for (const double tau : {0.5, 2.0}) {
                const double before = entropic_objective(cb, m, r, tau);
                // compare against the reassigned partition with the original q kept
                // per surviving cell and mass renormalized
                const double after = entropic_objective(re, m, r, tau);
                const double scale = std::max(1.0, std::abs(before));
                reassign_viol =
                    std::max(reassign_viol, (after - before) / scale - 1e-9);
            }
            // affine boundary: the pairwise decision function flips sign once
            for (std::size_t j = 0; j + 1 < assigned.partition.cells.size(); ++j) {
                const auto& cl = assigned.partition.cells[j];
                const auto& cr = assigned.partition.cells[j + 1];
                int flips = 0;
                double prev_sign = 0.0;
                for (int x = cl.lo; x < cr.hi; ++x) {
                    const double left = -assigned.log_q[j] - log_pmf(m, x, assigned.codepoints[j]);
                    const double right =
                        -assigned.log_q[j + 1] - log_pmf(m, x, assigned.codepoints[j + 1]);
                    const double sign = left <= right ? -1.0 : 1.0;
                    if (prev_sign != 0.0 && sign != prev_sign) ++flips;
                    prev_sign = sign;
                }
                boundary_viol = std::max(boundary_viol, std::abs(flips - 1) - 0.0);
            }
        }
    }
    ctx.record("codebook: regret nonnegative on random codebooks (1e-12)", regret_viol);
    ctx.record("codebook: invariants hold for random and reassigned codebooks", invariant_viol);
    ctx.record("codebook: reassignment never increases the entropic objective", reassign_viol);
    ctx.record("codebook: affine boundary sign flips exactly once", boundary_viol);
}

inline void check_criteria(SuiteContext& ctx) {
    double sandwich_viol = neg_inf, mono_viol = neg_inf, regroup_viol = neg_inf,
           renyi_viol = neg_inf, softmax_viol = neg_inf, escort_viol = neg_inf;
    for (const int n : ctx.sizes) {
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        for (int rep = 0; rep < 10; ++rep) {
            const Codebook cb = random_codebook(m, ctx.gen);
            const double ord = ordinary_objective(cb, m, r);
            const double wc = worst_case_codelength(cb, m, r).first;
            double prev = neg_inf;
            for (const double tau : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
                const double ent = entropic_objective(cb, m, r, tau);
                sandwich_viol = std::max(sandwich_viol, ord - ent - 1e-12);
                sandwich_viol = std::max(sandwich_viol, ent - wc - 1e-12);
                if (prev != neg_inf) mono_viol = std::max(mono_viol, prev - ent - 1e-12);
                prev = ent;
                softmax_viol =
                    std::max(softmax_viol, (wc - ent) - std::log(n + 1.0) / tau - 1e-12);
                renyi_viol =
                    std::max(renyi_viol, renyi_entropy(r, 1.0 / (1.0 + tau)) - ent - 1e-12);
                // regrouping identity: I = (1/tau) log sum_j q_j^{-tau} A_j
                std::vector<double> cells(cb.partition.cells.size());
                for (std::size_t j = 0; j < cells.size(); ++j)
                    cells[j] = -tau * cb.log_q[j] +
                               cell_A(m, r, cb.partition.cells[j], cb.codepoints[j], tau);
                const double regrouped = log_sum_exp(cells) / tau;
                regroup_viol = std::max(regroup_viol, std::abs(regrouped - ent) - 1e-12);
            }
        }
        // escort attains the Renyi floor of the unconstrained criterion
        for (const double tau : {0.5, 1.0, 4.0}) {
            const auto q = escort_distribution(r, tau);
            std::vector<double> terms(q.size());
            for (std::size_t x = 0; x < q.size(); ++x)
                terms[x] = r.log_r[x] - tau * std::log(q[x]);
            const double value = log_sum_exp(terms) / tau;
            escort_viol = std::max(
                escort_viol, std::abs(value - renyi_entropy(r, 1.0 / (1.0 + tau))) - 1e-12);
        }
    }
    {
        // cumulant expansion at the n=2 single-cell codebook
        const Model m = make_binomial(2);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        const Codebook cb{Partition{{{0, 3}}}, {0.5}, {0.0}};
        const double tau = 1e-3;
        const double half_var = (std::log(2.0) * std::log(2.0)) / 9.0;
        const double ratio = (entropic_objective(cb, m, r, tau) - ordinary_objective(cb, m, r)) / tau;
        ctx.record("criteria: cumulant expansion matches half-variance within 1%",
                   std::abs(ratio - half_var) - 0.01 * half_var);
    }
    ctx.record("criteria: ordinary <= entropic <= worst-case (1e-12)", sandwich_viol);
    ctx.record("criteria: entropic nondecreasing in tau (1e-12)", mono_viol);
    ctx.record("criteria: regrouping identity (1e-12)", regroup_viol);
    ctx.record("criteria: soft-max bound log(n+1)/tau (1e-12)", softmax_viol);
    ctx.record("criteria: Renyi floor (1e-12)", renyi_viol);
    ctx.record("criteria: escort attains the Renyi value (1e-12)", escort_viol);
}

inline void check_optimize(SuiteContext& ctx) {
    double stat_viol = neg_inf, meanval_viol = neg_inf, mproj_viol = neg_inf,
           slope_viol = neg_inf, fit_viol = neg_inf;
    for (const int n : ctx.sizes) {
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        for (const double tau : {0.5, 2.0}) {
            const FitResult fit =
                fit_codebook(m, r, CriterionSpec::entropic(tau), 0, ctx.cfg);
            if (!fit.converged) fit_viol = std::max(fit_viol, 1.0);
            for (std::size_t j = 0; j < fit.codebook.partition.cells.size(); ++j) {
                const Cell& cell = fit.codebook.partition.cells[j];
                const double theta = fit.codebook.codepoints[j];
                if (cell.hi - cell.lo == 1) continue;
                const double nu = m.natural_param(theta);
                double mt = 0.0;
                const auto w = tilted_weights(m, r, cell, theta, tau);
                for (int i = 0; i < cell.hi - cell.lo; ++i)
                    mt += w[i] * m.t_stat[cell.lo + i];
                stat_viol = std::max(
                    stat_viol, std::abs(m.n_trials * m.mean_map(nu) - mt) - 1e-8);
                meanval_viol =
                    std::max(meanval_viol, std::abs(m.mean_map(nu) - mt / m.n_trials) - 1e-8);
            }
        }
        // m-projection self-consistency on one interior cell
        if (n >= 4) {
            const Cell cell{1, std::min(4, n)};
            const double tau = 1.0;
            const double theta = tilted_codepoint(m, r, cell, tau, ctx.cfg).first;
            const auto w = tilted_weights(m, r, cell, theta, tau);
            const int grid = 20001;
            double best = pos_inf;
            double best_theta = 0.0;
            for (int i = 1; i < grid; ++i) {
                const double th = static_cast<double>(i) / grid;
                double ce = 0.0;  // cross-entropy part of KL(s || p(.|th))
                for (int idx = 0; idx < cell.hi - cell.lo; ++idx)
                    ce -= w[idx] * log_pmf(m, cell.lo + idx, th);
                if (ce < best) {
                    best = ce;
                    best_theta = th;
                }
            }
            mproj_viol = std::max(mproj_viol, std::abs(best_theta - theta) - 2.0 / grid);
        }
    }
    {
        // entropic codepoints approach ordinary codepoints linearly in tau
        const Model m = make_binomial(12);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        const Cell cell{2, 9};
        const double theta0 = ordinary_codepoint(m, r, cell);
        double ratio_hi = 0.0, ratio_lo = 0.0;
        for (const double tau : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const double dev = std::abs(tilted_codepoint(m, r, cell, tau, ctx.cfg).first - theta0);
            const double ratio = dev / tau;
            if (tau == 1e-1) ratio_hi = ratio;
            if (tau == 1e-4) ratio_lo = ratio;
        }
        slope_viol = ratio_lo - 2.0 * std::max(ratio_hi, 1e-9);
    }
    {
        // DP equals exhaustive interval enumeration for n <= 12, k <= 4
        double dp_viol = neg_inf;
        for (int n = 2; n <= 12; ++n) {
            const Model m = make_binomial(n);
            const double a = 0.5 + 2.0 * ctx.gen.u01();
            const double b = 0.5 + 2.0 * ctx.gen.u01();
            const PriorPredictive r = beta_binomial_predictive(m, a, b);
            for (const CriterionSpec spec : {CriterionSpec::ordinary(),
                                             CriterionSpec::entropic(0.5),
                                             CriterionSpec::entropic(2.0)}) {
                for (int k = 1; k <= std::min(4, m.support_size); ++k) {
                    const DpResult dp = interval_dp(m, r, k, spec, ctx.cfg);
                    double best = pos_inf;
                    std::vector<int> cuts(k + 1);
                    cuts[0] = 0;
                    cuts[k] = m.support_size;
                    const std::function<void(int, int)> enumerate = [&](int idx, int start) {
                        if (idx == k) {
                            Codebook cb;
                            for (int j = 0; j < k; ++j) {
                                const Cell cell{cuts[j], cuts[j + 1]};
                                cb.partition.cells.push_back(cell);
                                cb.codepoints.push_back(
                                    spec.kind == Criterion::ordinary
                                        ? ordinary_codepoint(m, r, cell)
                                        : tilted_codepoint(m, r, cell, spec.tau, ctx.cfg).first);
                            }
                            double value;
                            if (spec.kind == Criterion::ordinary) {
                                for (const auto& cell : cb.partition.cells)
                                    cb.log_q.push_back(log_sum_exp(
                                        r.log_r.data() + cell.lo, cell.hi - cell.lo));
                                value = ordinary_objective(cb, m, r);
                            } else {
                                value = profiled_objective(m, r, cb.partition, cb.codepoints,
                                                           spec.tau)
                                            .first;
                            }
                            best = std::min(best, value);
                            return;
                        }
                        for (int c = start + 1; c <= m.support_size - (k - idx); ++c) {
                            cuts[idx] = c;
                            enumerate(idx + 1, c);
                        }
                    };
                    enumerate(1, 0);
                    dp_viol = std::max(dp_viol, std::abs(dp.objective - best) - 1e-9);
                }
            }
        }
        ctx.record("optimize: DP equals exhaustive enumeration (n <= 12, k <= 4)", dp_viol);
    }
    ctx.record("optimize: tilted stationarity residual (1e-8)", stat_viol);
    ctx.record("optimize: mean-value identity (1e-8)", meanval_viol);
    ctx.record("optimize: m-projection grid self-consistency", mproj_viol);
    ctx.record("optimize: codepoint tau->0 linear convergence", slope_viol);
    ctx.record("optimize: coordinate descent converges without increase", fit_viol);
}

inline void check_robustness(SuiteContext& ctx) {
    double attain_viol = neg_inf, gibbs_viol = neg_inf, dv_viol = neg_inf, pac_viol = neg_inf,
           tilt_norm_viol = neg_inf;
    for (const int n : ctx.sizes) {
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        for (const double tau : {0.1, 1.0, 10.0}) {
            for (int rep = 0; rep < 5; ++rep) {
                const Codebook cb = random_codebook(m, ctx.gen);
                const double ent = entropic_objective(cb, m, r, tau);
                const TiltedMeasure star = optimal_tilt(cb, m, r, tau);
                tilt_norm_viol = std::max(
                    tilt_norm_viol, std::abs(std::exp(log_sum_exp(star.log_s)) - 1.0) - 1e-10);
                attain_viol = std::max(
                    attain_viol, std::abs(variational_value(cb, m, r, tau, star) - ent) - 1e-10);
                for (int t = 0; t < 20; ++t) {
                    const auto probs = ctx.gen.dirichlet(m.support_size);
                    TiltedMeasure s;
                    s.reference = "r_n";
                    for (const double p : probs) s.log_s.push_back(std::log(p));
                    const double value = variational_value(cb, m, r, tau, s);
                    dv_viol = std::max(dv_viol, value - ent - 1e-10);
                    const double gibbs = ent - kl_divergence(s.log_s, star.log_s) / tau;
                    gibbs_viol = std::max(gibbs_viol, std::abs(value - gibbs) - 1e-10);
                    pac_viol = std::max(pac_viol, -pac_bayes_gap(cb, m, r, tau, s) - 1e-12);
                }
            }
        }
    }
    ctx.record("robustness: optimal tilt normalized (1e-10)", tilt_norm_viol);
    ctx.record("robustness: supremum attained at s* (1e-10)", attain_viol);
    ctx.record("robustness: no tilt exceeds the objective (1e-10)", dv_viol);
    ctx.record("robustness: Gibbs decomposition (1e-10)", gibbs_viol);
    ctx.record("robustness: PAC-Bayes gap nonnegative (1e-12)", pac_viol);
}

inline void check_nml(SuiteContext& ctx) {
    double const_viol = neg_inf, minimax_viol = neg_inf, chain_viol = neg_inf,
           j_const_viol = neg_inf;
    for (const int n : ctx.sizes) {
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        const double log_s = shtarkov_sum(m);
        const RegretProfile nml = nml_distribution(m);
        double lo = pos_inf, hi = neg_inf;
        for (const double reg : nml.regret) {
            lo = std::min(lo, reg);
            hi = std::max(hi, reg);
        }
        const_viol = std::max(const_viol, (hi - lo) - 1e-12);
        for (const double tau : {0.1, 1.0, 100.0})
            j_const_viol = std::max(
                j_const_viol, std::abs(regret_entropic(nml, r.log_r, tau) - log_s) - 1e-12);
        if (n <= 20) {
            for (int rep = 0; rep < 1000; ++rep) {
                const auto probs = ctx.gen.dirichlet(m.support_size);
                const double shrink = 0.2 + 0.8 * ctx.gen.u01();  // sub-probability too
                std::vector<double> log_q(m.support_size);
                for (int x = 0; x < m.support_size; ++x)
                    log_q[x] = std::log(probs[x] * shrink);
                const RegretProfile p = regret_profile(m, log_q);
                minimax_viol = std::max(minimax_viol, log_s - p.sup_regret - 1e-12);
            }
        }
        // endpoint chain for the fitted worst-case codebook
        const FitResult wc = fit_codebook(m, r, CriterionSpec::worst_case(), 0, ctx.cfg);
        const RegretProfile prof = codebook_regret(wc.codebook, m);
        double sup_sum = neg_inf;
        for (int x = 0; x < m.support_size; ++x)
            sup_sum = std::max(sup_sum, -log_ml_pmf(m, x) + prof.regret[x]);
        const double direct = worst_case_codelength(wc.codebook, m, r).first;
        chain_viol = std::max(chain_viol, std::abs(sup_sum - direct) - 1e-10);
    }
    ctx.record("nml: NML regret constant (1e-12)", const_viol);
    ctx.record("nml: no coding distribution beats log S_n (1e-12)", minimax_viol);
    ctx.record("nml: J of NML equals log S_n for every tau (1e-12)", j_const_viol);
    ctx.record("nml: worst-case codelength = sup(ML + regret) (1e-10)", chain_viol);
}

inline void check_regimes(SuiteContext& ctx) {
    double nonneg_viol = neg_inf, bound_viol = neg_inf;
    std::vector<int> ns;
    for (const int n : ctx.sizes)
        if (n >= 3) ns.push_back(n);
    if (ns.size() >= 2) {
        for (const Schedule sched : {Schedule{Schedule::Kind::c_over_log_n, 0.5},
                                     Schedule{Schedule::Kind::c_log2_n, 1.0},
                                     Schedule{Schedule::Kind::constant, 1.0}}) {
            const RegimeSweep sweep = run_regime_sweep(sched, ns, 1.0, 1.0, 0, ctx.cfg);
            for (const auto& rec : sweep.records) {
                nonneg_viol = std::max(nonneg_viol, -rec.gap_mean - 1e-12);
                nonneg_viol = std::max(nonneg_viol, -rec.gap_sup - 1e-12);
                bound_viol = std::max(
                    bound_viol, rec.gap_sup - std::log(rec.n + 1.0) / rec.tau - 1e-12);
            }
        }
    }
    ctx.record("diagnostics: sweep gaps nonnegative (mean <= I <= sup)", nonneg_viol);
    ctx.record("diagnostics: sup-gap within log(n+1)/tau (1e-12)", bound_viol);
}

}  // namespace detail

inline InvariantReport run_invariant_suite(std::uint64_t seed, const std::vector<int>& sizes,
                                           const SolverConfig& cfg = {}) {
    for (const int n : sizes)
        if (n < 2 || n > 50)
            throw std::invalid_argument("run_invariant_suite: sizes must lie in {2,...,50}");
    detail::SuiteContext ctx{sizes, rng(seed), cfg, {}};
    detail::check_model(ctx);
    detail::check_codebook(ctx);
    detail::check_criteria(ctx);
    detail::check_optimize(ctx);
    detail::check_robustness(ctx);
    detail::check_nml(ctx);
    detail::check_regimes(ctx);
    return ctx.report;
}

}  // namespace esmml
