#pragma once

// Codepoint solvers (ordinary moment matching, tilted moment matching via
// bisection on the strictly increasing stationarity function), the minimax
// detail parameter for worst-case cells, the exact interval DP over
// contiguous partitions, and the full codebook fit with k selection and
// coordinate-descent polish.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "codebook.hpp"
#include "criteria.hpp"
#include "model.hpp"
#include "numerics.hpp"

namespace esmml {

struct SolverConfig {
    double codepoint_tol = 1e-10;   // stationarity tolerance in natural-parameter space
    int max_fixed_point_iters = 200;
    double damping = 1.0;           // in (0,1]; halved on oscillation
    int k_max = 32;                 // cap on the k sweep (clamped to support_size)
    int max_outer_iters = 100;      // coordinate-descent rounds
    double objective_tol = 1e-12;   // convergence / tie threshold on objectives
};

inline double ordinary_codepoint(const Model& m, const PriorPredictive& r, const Cell& cell) {
    const double z = log_sum_exp(r.log_r.data() + cell.lo, cell.hi - cell.lo);
    double mean_t = 0.0;
    for (int x = cell.lo; x < cell.hi; ++x)
        mean_t += std::exp(r.log_r[x] - z) * m.t_stat[x];
    const double theta = mean_t / m.n_trials;
    return std::clamp(theta, m.param_lo, m.param_hi);
}

// Cell-internal tilted weights w(x) proportional to r(x) p(x|theta)^{-tau},
// normalized within the cell. Computed against an arbitrary log-weight
// vector so the regret-centered criterion can reuse the same machinery.
inline std::vector<double> tilted_weights_from(const Model& m, const std::vector<double>& log_w,
                                               const Cell& cell, double theta, double tau) {
    const int width = cell.hi - cell.lo;
    std::vector<double> a(width);
    for (int i = 0; i < width; ++i)
        a[i] = log_w[cell.lo + i] - tau * log_pmf(m, cell.lo + i, theta);
    const double z = log_sum_exp(a);
    std::vector<double> w(width);
    for (int i = 0; i < width; ++i) w[i] = std::exp(a[i] - z);
    return w;
}

inline std::vector<double> tilted_weights(const Model& m, const PriorPredictive& r,
                                          const Cell& cell, double theta, double tau) {
    return tilted_weights_from(m, r.log_r, cell, theta, tau);
}

namespace detail {

// stationarity function g(nu) = n A'(nu) - sum_cell w(x;nu) T(x);
// strictly increasing because log A_{j,tau} is convex in nu.
inline double tilted_g(const Model& m, const std::vector<double>& log_w, const Cell& cell,
                       double nu, double tau, double* tilted_mean = nullptr) {
    const int width = cell.hi - cell.lo;
    std::vector<double> a(width);
    for (int i = 0; i < width; ++i) {
        const int x = cell.lo + i;
        a[i] = log_w[x] - tau * (m.log_h[x] + nu * m.t_stat[x]);
    }
    const double z = log_sum_exp(a);
    double mt = 0.0;
    for (int i = 0; i < width; ++i) mt += std::exp(a[i] - z) * m.t_stat[cell.lo + i];
    if (tilted_mean) *tilted_mean = mt;
    return m.n_trials * m.mean_map(nu) - mt;
}

inline std::pair<double, double> tilted_codepoint_from(const Model& m,
                                                       const std::vector<double>& log_w,
                                                       const Cell& cell, double tau,
                                                       const SolverConfig& cfg) {
    if (cell.hi - cell.lo == 1) {
        const double theta = m.t_stat[cell.lo] / m.n_trials;
        return {std::clamp(theta, m.param_lo, m.param_hi), 0.0};
    }
    double t_min = pos_inf, t_max = neg_inf, t_sum = 0.0;
    for (int x = cell.lo; x < cell.hi; ++x) {
        t_min = std::min(t_min, m.t_stat[x]);
        t_max = std::max(t_max, m.t_stat[x]);
        t_sum += m.t_stat[x];
    }
    // g(-inf) = -t_max < 0 and g(+inf) = n - t_min > 0 for non-singleton
    // cells, so an expanding bracket around a central start always closes.
    const double theta0 = std::clamp(t_sum / (cell.hi - cell.lo) / m.n_trials, 1e-9, 1.0 - 1e-9);
    double lo = m.natural_param(theta0) - 1.0;
    double hi = m.natural_param(theta0) + 1.0;
    double step = 1.0;
    while (tilted_g(m, log_w, cell, lo, tau) > 0.0) {
        step *= 2.0;
        lo -= step;
    }
    step = 1.0;
    while (tilted_g(m, log_w, cell, hi, tau) < 0.0) {
        step *= 2.0;
        hi += step;
    }
    for (int it = 0; it < 200 && hi - lo > cfg.codepoint_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tilted_g(m, log_w, cell, mid, tau) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double nu = 0.5 * (lo + hi);
    // Newton polish; g'(nu) = n A''(nu) + tau Var_w(T) > 0
    for (int it = 0; it < 4; ++it) {
        double mt = 0.0;
        const double g = tilted_g(m, log_w, cell, nu, tau, &mt);
        const auto w = tilted_weights_from(m, log_w, cell, m.mean_map(nu), tau);
        double var_t = 0.0;
        for (int i = 0; i < cell.hi - cell.lo; ++i) {
            const double d = m.t_stat[cell.lo + i] - mt;
            var_t += w[i] * d * d;
        }
        const double s = m.mean_map(nu);
        const double gp = m.n_trials * s * (1.0 - s) + tau * var_t;
        if (gp <= 0.0) break;
        const double next = nu - g / gp;
        if (next < lo || next > hi) break;
        nu = next;
    }
    const double residual = std::abs(tilted_g(m, log_w, cell, nu, tau));
    return {std::clamp(m.mean_map(nu), m.param_lo, m.param_hi), residual};
}

}  // namespace detail

inline std::pair<double, double> tilted_codepoint(const Model& m, const PriorPredictive& r,
                                                  const Cell& cell, double tau,
                                                  const SolverConfig& cfg = {}) {
    return detail::tilted_codepoint_from(m, r.log_r, cell, tau, cfg);
}

// Damped fixed-point alternative on the tilted moment equation; used as a
// cross-check of the bisection path, not as the default.
inline std::pair<double, double> tilted_codepoint_fixed_point(const Model& m,
                                                              const PriorPredictive& r,
                                                              const Cell& cell, double tau,
                                                              const SolverConfig& cfg = {}) {
    if (cell.hi - cell.lo == 1) {
        const double theta = m.t_stat[cell.lo] / m.n_trials;
        return {std::clamp(theta, m.param_lo, m.param_hi), 0.0};
    }
    double theta = std::clamp(ordinary_codepoint(m, r, cell), 1e-9, 1.0 - 1e-9);
    double damping = cfg.damping;
    double prev_delta = 0.0;
    for (int it = 0; it < cfg.max_fixed_point_iters; ++it) {
        const auto w = tilted_weights(m, r, cell, theta, tau);
        double mt = 0.0;
        for (int i = 0; i < cell.hi - cell.lo; ++i) mt += w[i] * m.t_stat[cell.lo + i];
        const double target = std::clamp(mt / m.n_trials, 1e-12, 1.0 - 1e-12);
        const double delta = target - theta;
        if (it > 0 && delta * prev_delta < 0.0) damping *= 0.5;  // oscillation
        theta = std::clamp(theta + damping * delta, 1e-12, 1.0 - 1e-12);
        prev_delta = delta;
        if (std::abs(delta) < cfg.codepoint_tol) break;
    }
    const double residual =
        std::abs(detail::tilted_g(m, r.log_r, cell, m.natural_param(theta), tau));
    return {theta, residual};
}

// Minimax detail parameter of a cell: minimizes max_{x in cell} -log p(x|theta).
// The detail length is convex in T(x) for fixed nu, so the cell maximum sits
// at the endpoints; the minimax nu is either the endpoint equalizer or the
// unconstrained minimum of the dominating endpoint branch.
inline std::pair<double, double> minimax_detail(const Model& m, const Cell& cell) {
    const int lo = cell.lo, hi = cell.hi - 1;
    if (lo == hi) {
        const double theta = std::clamp(m.t_stat[lo] / m.n_trials, m.param_lo, m.param_hi);
        return {theta, -log_ml_pmf(m, lo)};
    }
    const double t_lo = m.t_stat[lo], t_hi = m.t_stat[hi];
    const auto branch_max = [&](double nu) {
        const double a = m.n_trials * m.log_partition(nu);
        return std::max(-m.log_h[lo] - nu * t_lo + a, -m.log_h[hi] - nu * t_hi + a);
    };
    std::vector<double> candidates;
    candidates.push_back((m.log_h[lo] - m.log_h[hi]) / (t_hi - t_lo));  // equalizer
    if (t_lo > 0.0 && t_lo < m.n_trials) candidates.push_back(m.natural_param(t_lo / m.n_trials));
    if (t_hi > 0.0 && t_hi < m.n_trials) candidates.push_back(m.natural_param(t_hi / m.n_trials));
    double best_nu = candidates[0];
    double best = branch_max(best_nu);
    for (const double nu : candidates) {
        const double v = branch_max(nu);
        if (v < best) {
            best = v;
            best_nu = nu;
        }
    }
    const double theta = std::clamp(m.mean_map(best_nu), m.param_lo, m.param_hi);
    double detail = neg_inf;
    for (int x = cell.lo; x < cell.hi; ++x) detail = std::max(detail, -log_pmf(m, x, theta));
    return {theta, detail};
}

struct DpResult {
    Partition partition;
    std::vector<double> codepoints;
    std::vector<double> log_q;
    double objective = 0.0;
};

namespace detail {

// Per-cell DP cost under the given criterion. Ordinary costs combine by
// addition; the others combine by log-add, after which the DP value maps
// monotonically to the true objective.
struct DpCosts {
    std::vector<std::vector<double>> cost;   // [lo][hi - lo - 1]
    std::vector<std::vector<double>> theta;
    bool additive = true;
};

inline std::vector<double> regret_log_weights(const Model& m, const PriorPredictive& r,
                                              double tau) {
    std::vector<double> w(m.support_size);
    for (int x = 0; x < m.support_size; ++x) w[x] = r.log_r[x] + tau * log_ml_pmf(m, x);
    return w;
}

inline DpCosts dp_costs(const Model& m, const PriorPredictive& r, const CriterionSpec& spec,
                        const SolverConfig& cfg) {
    const int N = m.support_size;
    DpCosts out;
    out.cost.resize(N);
    out.theta.resize(N);
    out.additive = spec.kind == Criterion::ordinary;

    std::vector<double> log_w;
    if (spec.kind == Criterion::regret_entropic) log_w = regret_log_weights(m, r, spec.tau);

    // prefix sums for ordinary costs: sum r, sum r*T, sum r*log_h
    std::vector<double> pr(N + 1, 0.0), prt(N + 1, 0.0), prh(N + 1, 0.0);
    for (int x = 0; x < N; ++x) {
        const double rx = std::exp(r.log_r[x]);
        pr[x + 1] = pr[x] + rx;
        prt[x + 1] = prt[x] + rx * m.t_stat[x];
        prh[x + 1] = prh[x] + rx * m.log_h[x];
    }

    for (int lo = 0; lo < N; ++lo) {
        out.cost[lo].resize(N - lo);
        out.theta[lo].resize(N - lo);
        for (int hi = lo + 1; hi <= N; ++hi) {
            const Cell cell{lo, hi};
            double c, theta;
            switch (spec.kind) {
                case Criterion::ordinary: {
                    theta = ordinary_codepoint(m, r, cell);
                    const double mass = pr[hi] - pr[lo];
                    const double assertion = -xlogy(mass, mass);
                    double det;
                    if (theta == m.param_lo || theta == m.param_hi) {
                        det = 0.0;  // boundary cell is a single point with pmf 1
                    } else {
                        const double nu = m.natural_param(theta);
                        det = -((prh[hi] - prh[lo]) + nu * (prt[hi] - prt[lo]) -
                                mass * m.n_trials * m.log_partition(nu));
                    }
                    c = assertion + det;
                    break;
                }
                case Criterion::entropic: {
                    const double th = tilted_codepoint(m, r, cell, spec.tau, cfg).first;
                    theta = th;
                    c = cell_A(m, r, cell, th, spec.tau) / (1.0 + spec.tau);
                    break;
                }
                case Criterion::regret_entropic: {
                    const double th = tilted_codepoint_from(m, log_w, cell, spec.tau, cfg).first;
                    theta = th;
                    std::vector<double> terms;
                    terms.reserve(hi - lo);
                    for (int x = lo; x < hi; ++x)
                        terms.push_back(log_w[x] - spec.tau * log_pmf(m, x, th));
                    c = log_sum_exp(terms) / (1.0 + spec.tau);
                    break;
                }
                case Criterion::worst_case: {
                    auto [th, d] = minimax_detail(m, cell);
                    theta = th;
                    c = d;
                    break;
                }
            }
            out.cost[lo][hi - lo - 1] = c;
            out.theta[lo][hi - lo - 1] = theta;
        }
    }
    return out;
}

// Maps the DP aggregate to the criterion objective and profiles q.
inline void finish_dp(const Model&, const PriorPredictive& r, const CriterionSpec& spec,
                      const DpCosts& costs, DpResult& res) {
    const std::size_t k = res.partition.cells.size();
    res.log_q.resize(k);
    std::vector<double> cell_costs(k);
    for (std::size_t j = 0; j < k; ++j) {
        const Cell& c = res.partition.cells[j];
        cell_costs[j] = costs.cost[c.lo][c.hi - c.lo - 1];
    }
    switch (spec.kind) {
        case Criterion::ordinary: {
            double total = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const Cell& c = res.partition.cells[j];
                res.log_q[j] = log_sum_exp(r.log_r.data() + c.lo, c.hi - c.lo);
                total += cell_costs[j];
            }
            res.objective = total;
            break;
        }
        case Criterion::entropic:
        case Criterion::regret_entropic: {
            const double z = log_sum_exp(cell_costs);
            for (std::size_t j = 0; j < k; ++j) res.log_q[j] = cell_costs[j] - z;
            res.objective = (1.0 + spec.tau) / spec.tau * z;
            break;
        }
        case Criterion::worst_case: {
            const double z = log_sum_exp(cell_costs);
            for (std::size_t j = 0; j < k; ++j) res.log_q[j] = cell_costs[j] - z;
            res.objective = z;
            break;
        }
    }
}

}  // namespace detail

// Exact optimal contiguous k-cell partition for the per-cell criterion cost.
// Backward DP over suffixes with tie-tolerant greedy reconstruction picking
// the smallest boundary, which yields the lexicographically smallest
// boundary sequence among ties.
inline DpResult interval_dp(const Model& m, const PriorPredictive& r, int k,
                            const CriterionSpec& spec, const SolverConfig& cfg = {}) {
    const int N = m.support_size;
    if (k < 1 || k > N) throw std::invalid_argument("interval_dp: k must lie in [1, support_size]");
    const auto costs = detail::dp_costs(m, r, spec, cfg);
    const double empty = costs.additive ? 0.0 : neg_inf;
    const auto add = [&](double a, double b) {
        return costs.additive ? a + b : log_add_exp(a, b);
    };

    // dp[j][i]: best value of covering [i, N) with exactly j cells
    std::vector<std::vector<double>> dp(k + 1, std::vector<double>(N + 1, pos_inf));
    dp[0][N] = empty;
    for (int j = 1; j <= k; ++j) {
        const int max_start = N - j;
        for (int i = max_start; i >= 0; --i) {
            double best = pos_inf;
            for (int mid = i + 1; mid <= N; ++mid) {
                if (dp[j - 1][mid] == pos_inf) continue;
                const double v = add(costs.cost[i][mid - i - 1], dp[j - 1][mid]);
                if (v < best) best = v;
            }
            dp[j][i] = best;
        }
    }

    DpResult res;
    int i = 0;
    for (int j = k; j >= 1; --j) {
        const double target = dp[j][i];
        const double slack = 1e-12 * std::max(1.0, std::abs(target));
        for (int mid = i + 1; mid <= N; ++mid) {
            if (dp[j - 1][mid] == pos_inf) continue;
            const double v = add(costs.cost[i][mid - i - 1], dp[j - 1][mid]);
            if (v <= target + slack) {
                res.partition.cells.push_back({i, mid});
                res.codepoints.push_back(costs.theta[i][mid - i - 1]);
                i = mid;
                break;
            }
        }
    }
    if (i != N) throw std::logic_error("interval_dp: reconstruction failed");
    detail::finish_dp(m, r, spec, costs, res);
    return res;
}

struct FitResult {
    Codebook codebook;
    double objective = 0.0;
    int k = 0;
    bool converged = true;
    std::vector<std::string> tie_notes;
    std::vector<int> tied_ks;  // k values within objective_tol of the winner
};

namespace detail {

inline double criterion_value(const Codebook& cb, const Model& m, const PriorPredictive& r,
                              const CriterionSpec& spec) {
    switch (spec.kind) {
        case Criterion::ordinary: return ordinary_objective(cb, m, r);
        case Criterion::entropic: return entropic_objective(cb, m, r, spec.tau);
        case Criterion::worst_case: return worst_case_codelength(cb, m, r).first;
        case Criterion::regret_entropic: {
            std::vector<double> terms(m.support_size);
            for (int x = 0; x < m.support_size; ++x)
                terms[x] = r.log_r[x] +
                           spec.tau * (two_part_codelength(cb, m, x) - (-log_ml_pmf(m, x)));
            return log_sum_exp(terms) / spec.tau;
        }
    }
    return 0.0;
}

inline void resolve_cell_parameters(const Model& m, const PriorPredictive& r,
                                    const CriterionSpec& spec, const SolverConfig& cfg,
                                    Codebook& cb) {
    const auto& cells = cb.partition.cells;
    const std::size_t k = cells.size();
    cb.codepoints.resize(k);
    std::vector<double> cost(k);
    std::vector<double> log_w;
    if (spec.kind == Criterion::regret_entropic) log_w = regret_log_weights(m, r, spec.tau);
    for (std::size_t j = 0; j < k; ++j) {
        switch (spec.kind) {
            case Criterion::ordinary:
                cb.codepoints[j] = ordinary_codepoint(m, r, cells[j]);
                break;
            case Criterion::entropic:
                cb.codepoints[j] = tilted_codepoint(m, r, cells[j], spec.tau, cfg).first;
                cost[j] = cell_A(m, r, cells[j], cb.codepoints[j], spec.tau) / (1.0 + spec.tau);
                break;
            case Criterion::regret_entropic: {
                cb.codepoints[j] =
                    tilted_codepoint_from(m, log_w, cells[j], spec.tau, cfg).first;
                std::vector<double> terms;
                for (int x = cells[j].lo; x < cells[j].hi; ++x)
                    terms.push_back(log_w[x] - spec.tau * log_pmf(m, x, cb.codepoints[j]));
                cost[j] = log_sum_exp(terms) / (1.0 + spec.tau);
                break;
            }
            case Criterion::worst_case: {
                auto [th, d] = minimax_detail(m, cells[j]);
                cb.codepoints[j] = th;
                cost[j] = d;
                break;
            }
        }
    }
    cb.log_q.resize(k);
    if (spec.kind == Criterion::ordinary) {
        for (std::size_t j = 0; j < k; ++j)
            cb.log_q[j] = log_sum_exp(r.log_r.data() + cells[j].lo, cells[j].hi - cells[j].lo);
    } else {
        const double z = log_sum_exp(cost);
        for (std::size_t j = 0; j < k; ++j) cb.log_q[j] = cost[j] - z;
    }
}

}  // namespace detail

// Full fit at one k (dp + coordinate-descent polish). The polish alternates
// pointwise reassignment, codepoint re-solves, and q re-profiling; the
// monitored objective never increases (asserted) and the loop stops when the
// decrease falls below objective_tol.
inline FitResult fit_codebook_at_k(const Model& m, const PriorPredictive& r,
                                   const CriterionSpec& spec, int k,
                                   const SolverConfig& cfg = {}) {
    DpResult dp = interval_dp(m, r, k, spec, cfg);
    Codebook cb{dp.partition, dp.codepoints, dp.log_q};
    FitResult fit;
    fit.converged = true;
    double obj = detail::criterion_value(cb, m, r, spec);
    if (spec.kind != Criterion::worst_case) {
        int round = 0;
        for (; round < cfg.max_outer_iters; ++round) {
            Codebook next = cb;
            auto assigned = assign_partition(m, next.codepoints, next.log_q);
            next.partition = assigned.partition;
            detail::resolve_cell_parameters(m, r, spec, cfg, next);
            const double next_obj = detail::criterion_value(next, m, r, spec);
            if (next_obj > obj + 1e-9 * std::max(1.0, std::abs(obj)))
                throw std::logic_error("fit_codebook: objective increased during polish");
            const double drop = obj - next_obj;
            if (next_obj <= obj) {
                cb = std::move(next);
                obj = next_obj;
            }
            if (drop < cfg.objective_tol) break;
        }
        if (round == cfg.max_outer_iters) fit.converged = false;
    }
    fit.codebook = std::move(cb);
    fit.objective = obj;
    fit.k = static_cast<int>(fit.codebook.partition.cells.size());
    return fit;
}

// k selection: sweep k = 1..k_max, keep the best objective; ties within
// objective_tol resolve toward the smallest k and are recorded.
inline FitResult fit_codebook(const Model& m, const PriorPredictive& r, const CriterionSpec& spec,
                              int k /* 0 = auto */, const SolverConfig& cfg = {}) {
    if (k != 0) return fit_codebook_at_k(m, r, spec, k, cfg);
    const int k_cap = std::min(cfg.k_max, m.support_size);
    FitResult best;
    std::vector<std::pair<int, double>> curve;
    for (int kk = 1; kk <= k_cap; ++kk) {
        FitResult cand = fit_codebook_at_k(m, r, spec, kk, cfg);
        curve.emplace_back(kk, cand.objective);
        if (best.k == 0 || cand.objective < best.objective - cfg.objective_tol)
            best = std::move(cand);
    }
    for (const auto& [kk, obj] : curve) {
        if (kk != best.k && std::abs(obj - best.objective) <= cfg.objective_tol) {
            best.tied_ks.push_back(kk);
            best.tie_notes.push_back("k=" + std::to_string(kk) +
                                     " ties the selected k=" + std::to_string(best.k) +
                                     " within objective_tol");
        }
    }
    return best;
}

}  // namespace esmml
