#pragma once

// Export types: CodebookReport with lossless JSON round-trip (stable key
// order) and plot-ready CSV emitters. All stored values are nats; bit
// conversion happens in the writers only.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codebook.hpp"
#include "criteria.hpp"
#include "diagnostics.hpp"
#include "model.hpp"
#include "nml.hpp"
#include "optimize.hpp"

namespace esmml {

struct CellReport {
    int lo = 0;
    int hi = 0;
    double q = 0.0;
    double theta = 0.0;
};

struct PointRow {
    int x = 0;
    double lambda = 0.0;
    double lambda_ml = 0.0;
    double neg_log_r = 0.0;
    double regret = 0.0;
};

struct CodebookReport {
    std::string family = "binomial";
    int n_trials = 0;
    double prior_a = 1.0;
    double prior_b = 1.0;
    std::string criterion;
    double tau = 0.0;  // 0 when the criterion has no tau
    int k = 0;
    std::vector<CellReport> cells;
    double objective_nats = 0.0;
    double objective_bits = 0.0;
    bool converged = true;
    std::vector<std::string> tie_notes;
    std::vector<int> tied_ks;
    std::vector<PointRow> table;
};

inline CodebookReport make_report(const Model& m, const PriorPredictive& r,
                                  const CriterionSpec& spec, const FitResult& fit) {
    CodebookReport rep;
    rep.n_trials = m.n_trials;
    rep.prior_a = r.prior_a;
    rep.prior_b = r.prior_b;
    rep.criterion = spec.name();
    rep.tau = spec.has_tau() ? spec.tau : 0.0;
    rep.k = fit.k;
    for (std::size_t j = 0; j < fit.codebook.partition.cells.size(); ++j)
        rep.cells.push_back({fit.codebook.partition.cells[j].lo,
                             fit.codebook.partition.cells[j].hi,
                             std::exp(fit.codebook.log_q[j]), fit.codebook.codepoints[j]});
    rep.objective_nats = fit.objective;
    rep.objective_bits = fit.objective / std::log(2.0);
    rep.converged = fit.converged;
    rep.tie_notes = fit.tie_notes;
    rep.tied_ks = fit.tied_ks;
    for (int x = 0; x < m.support_size; ++x) {
        PointRow row;
        row.x = x;
        row.lambda = two_part_codelength(fit.codebook, m, x);
        row.lambda_ml = -log_ml_pmf(m, x);
        row.neg_log_r = -r.log_r[x];
        row.regret = row.lambda - row.lambda_ml;
        rep.table.push_back(row);
    }
    return rep;
}

inline nlohmann::ordered_json to_json(const CodebookReport& rep) {
    nlohmann::ordered_json j;
    j["model"] = {{"family", rep.family},
                  {"n_trials", rep.n_trials},
                  {"prior_a", rep.prior_a},
                  {"prior_b", rep.prior_b}};
    j["criterion"] = {{"kind", rep.criterion}, {"tau", rep.tau}};
    j["k"] = rep.k;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.cells)
        j["cells"].push_back({{"lo", c.lo}, {"hi", c.hi}, {"q", c.q}, {"theta", c.theta}});
    j["objective_nats"] = rep.objective_nats;
    j["objective_bits"] = rep.objective_bits;
    j["converged"] = rep.converged;
    j["tie_notes"] = rep.tie_notes;
    j["tied_ks"] = rep.tied_ks;
    j["table"] = nlohmann::ordered_json::array();
    for (const auto& row : rep.table)
        j["table"].push_back({{"x", row.x},
                              {"lambda", row.lambda},
                              {"lambda_ml", row.lambda_ml},
                              {"neg_log_r", row.neg_log_r},
                              {"regret", row.regret}});
    return j;
}

inline CodebookReport report_from_json(const nlohmann::ordered_json& j) {
    CodebookReport rep;
    rep.family = j.at("model").at("family").get<std::string>();
    rep.n_trials = j.at("model").at("n_trials").get<int>();
    rep.prior_a = j.at("model").at("prior_a").get<double>();
    rep.prior_b = j.at("model").at("prior_b").get<double>();
    rep.criterion = j.at("criterion").at("kind").get<std::string>();
    rep.tau = j.at("criterion").at("tau").get<double>();
    rep.k = j.at("k").get<int>();
    for (const auto& c : j.at("cells"))
        rep.cells.push_back({c.at("lo").get<int>(), c.at("hi").get<int>(),
                             c.at("q").get<double>(), c.at("theta").get<double>()});
    rep.objective_nats = j.at("objective_nats").get<double>();
    rep.objective_bits = j.at("objective_bits").get<double>();
    rep.converged = j.at("converged").get<bool>();
    rep.tie_notes = j.at("tie_notes").get<std::vector<std::string>>();
    rep.tied_ks = j.at("tied_ks").get<std::vector<int>>();
    for (const auto& row : j.at("table"))
        rep.table.push_back({row.at("x").get<int>(), row.at("lambda").get<double>(),
                             row.at("lambda_ml").get<double>(),
                             row.at("neg_log_r").get<double>(), row.at("regret").get<double>()});
    return rep;
}

inline bool reports_equal(const CodebookReport& a, const CodebookReport& b) {
    if (a.family != b.family || a.n_trials != b.n_trials || a.prior_a != b.prior_a ||
        a.prior_b != b.prior_b || a.criterion != b.criterion || a.tau != b.tau || a.k != b.k ||
        a.objective_nats != b.objective_nats || a.objective_bits != b.objective_bits ||
        a.converged != b.converged || a.tie_notes != b.tie_notes || a.tied_ks != b.tied_ks)
        return false;
    if (a.cells.size() != b.cells.size() || a.table.size() != b.table.size()) return false;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        if (a.cells[i].lo != b.cells[i].lo || a.cells[i].hi != b.cells[i].hi ||
            a.cells[i].q != b.cells[i].q || a.cells[i].theta != b.cells[i].theta)
            return false;
    for (std::size_t i = 0; i < a.table.size(); ++i)
        if (a.table[i].x != b.table[i].x || a.table[i].lambda != b.table[i].lambda ||
            a.table[i].lambda_ml != b.table[i].lambda_ml ||
            a.table[i].neg_log_r != b.table[i].neg_log_r ||
            a.table[i].regret != b.table[i].regret)
            return false;
    return true;
}

namespace detail {

inline std::string fmt12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

// per-point CSV mirroring the report table; `bits` rescales codelengths only
inline void write_fit_table_csv(std::ostream& os, const CodebookReport& rep, bool bits = false) {
    const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
    os << "x,lambda,lambda_ml,neg_log_r,regret\n";
    for (const auto& row : rep.table)
        os << row.x << ',' << detail::fmt12(row.lambda * scale) << ','
           << detail::fmt12(row.lambda_ml * scale) << ','
           << detail::fmt12(row.neg_log_r * scale) << ',' << detail::fmt12(row.regret * scale)
           << '\n';
}

struct SweepRow {
    double tau = 0.0;
    double objective = 0.0;
    double ordinary = 0.0;
    double worst_case = 0.0;
    double renyi_bound = 0.0;
    int k = 0;
};

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                            bool bits = false) {
    const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
    os << "tau,objective,ordinary,worst_case,renyi_bound,k\n";
    for (const auto& row : rows)
        os << detail::fmt12(row.tau) << ',' << detail::fmt12(row.objective * scale) << ','
           << detail::fmt12(row.ordinary * scale) << ',' << detail::fmt12(row.worst_case * scale)
           << ',' << detail::fmt12(row.renyi_bound * scale) << ',' << row.k << '\n';
}

inline void write_regimes_csv(std::ostream& os, const RegimeSweep& sweep, bool bits = false) {
    const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
    os << "n,tau,I,mean,sup,gap_mean,gap_sup\n";
    for (const auto& rec : sweep.records)
        os << rec.n << ',' << detail::fmt12(rec.tau) << ',' << detail::fmt12(rec.I * scale) << ','
           << detail::fmt12(rec.mean * scale) << ',' << detail::fmt12(rec.sup * scale) << ','
           << detail::fmt12(rec.gap_mean * scale) << ',' << detail::fmt12(rec.gap_sup * scale)
           << '\n';
}

inline nlohmann::ordered_json nml_to_json(const Model& m, const RegretProfile& profile,
                                          bool bits = false) {
    const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
    double lo = pos_inf, hi = neg_inf;
    for (const double reg : profile.regret) {
        lo = std::min(lo, reg);
        hi = std::max(hi, reg);
    }
    nlohmann::ordered_json j;
    j["model"] = {{"family", "binomial"}, {"n_trials", m.n_trials}};
    j["log_S_n"] = shtarkov_sum(m) * scale;
    j["Q"] = nlohmann::ordered_json::array();
    j["regret"] = nlohmann::ordered_json::array();
    for (int x = 0; x < m.support_size; ++x) {
        j["Q"].push_back(std::exp(profile.log_Q[x]));
        j["regret"].push_back(profile.regret[x] * scale);
    }
    j["regret_spread"] = (hi - lo) * scale;
    return j;
}

}  // namespace esmml
