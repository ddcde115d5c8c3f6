#pragma once

// Command-line surface: fit / sweep / nml / regimes / verify. Usage problems
// exit 2, verification failures exit 1, runtime faults exit 1. All output is
// nats unless --bits rescales codelength-valued columns at write time.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diagnostics.hpp"
#include "model.hpp"
#include "optimize.hpp"
#include "report.hpp"

namespace esmml::cli {

namespace detail {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int parse_k(const std::string& text) {
    if (text == "auto") return 0;
    try {
        std::size_t used = 0;
        const int k = std::stoi(text, &used);
        if (used != text.size() || k < 1) throw UsageError("--k must be 'auto' or a positive integer");
        return k;
    } catch (const UsageError&) {
        throw;
    } catch (...) {
        throw UsageError("--k must be 'auto' or a positive integer");
    }
}

inline std::vector<double> parse_tau_list(const std::string& text) {
    std::vector<double> taus;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double tau = std::stod(item, &used);
            if (used != item.size()) throw UsageError("bad tau: " + item);
            if (!(tau > 0.0) || !std::isfinite(tau)) throw UsageError("tau must be positive: " + item);
            taus.push_back(tau);
        } catch (const UsageError&) {
            throw;
        } catch (...) {
            throw UsageError("bad tau: " + item);
        }
    }
    if (taus.empty()) throw UsageError("--taus needs at least one value");
    return taus;
}

inline std::vector<int> parse_int_list(const std::string& text, const char* flag) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stoi(item, &used));
            if (used != item.size()) throw UsageError(std::string(flag) + ": bad entry " + item);
        } catch (const UsageError&) {
            throw;
        } catch (...) {
            throw UsageError(std::string(flag) + ": bad entry " + item);
        }
    }
    if (values.empty()) throw UsageError(std::string(flag) + " needs at least one value");
    return values;
}

inline std::vector<int> parse_range(const std::string& text) {
    std::vector<int> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stoi(item, &used));
            if (used != item.size()) throw UsageError("--ns: bad entry " + item);
        } catch (const UsageError&) {
            throw;
        } catch (...) {
            throw UsageError("--ns: bad entry " + item);
        }
    }
    if (parts.size() != 3) throw UsageError("--ns expects lo:hi:step");
    const int lo = parts[0], hi = parts[1], step = parts[2];
    if (lo < 2 || hi < lo || step < 1) throw UsageError("--ns expects 2 <= lo <= hi and step >= 1");
    std::vector<int> ns;
    for (int n = lo; n <= hi; n += step) ns.push_back(n);
    return ns;
}

// writes to --out when given, stdout otherwise
struct Sink {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &std::cout;

    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file) throw std::runtime_error("cannot open " + path);
            os = file.get();
        }
    }
};

struct FitArgs {
    std::string model = "binomial";
    int n = 0;
    double prior_a = 1.0;
    double prior_b = 1.0;
    std::string criterion;
    double tau = -1.0;
    bool tau_given = false;
    std::string k = "auto";
    int kmax = 32;
    std::string out;
    std::string table;
    bool bits = false;
};

inline void add_fit_flags(CLI::App* cmd, FitArgs& a, bool criterion_required) {
    cmd->add_option("--model", a.model, "model family");
    cmd->add_option("--n", a.n, "number of trials")->required();
    cmd->add_option("--prior-a", a.prior_a, "Beta prior shape a");
    cmd->add_option("--prior-b", a.prior_b, "Beta prior shape b");
    auto* crit = cmd->add_option("--criterion", a.criterion,
                                 "ordinary | entropic | worstcase");
    if (criterion_required) crit->required();
    cmd->add_option("--tau", a.tau, "entropic temperature")->each([&a](const std::string&) {
        a.tau_given = true;
    });
    cmd->add_option("--k", a.k, "codebook size, 'auto' or a positive integer");
    cmd->add_option("--kmax", a.kmax, "largest k tried when --k auto");
    cmd->add_option("--out", a.out, "output JSON path (stdout when absent)");
    cmd->add_flag("--bits", a.bits, "report codelengths in bits");
}

inline CriterionSpec make_spec(const FitArgs& a) {
    if (a.model != "binomial") throw UsageError("unknown model: " + a.model);
    if (a.criterion == "ordinary" || a.criterion == "worstcase") {
        if (a.tau_given) throw UsageError("--tau only applies to --criterion entropic");
        return a.criterion == "ordinary" ? CriterionSpec::ordinary() : CriterionSpec::worst_case();
    }
    if (a.criterion == "entropic") {
        if (!a.tau_given) throw UsageError("--criterion entropic requires --tau");
        if (!(a.tau > 0.0) || !std::isfinite(a.tau)) throw UsageError("--tau must be positive");
        return CriterionSpec::entropic(a.tau);
    }
    throw UsageError("unknown criterion: " + a.criterion);
}

inline int run_fit(const FitArgs& a, const std::string& table_path) {
    const CriterionSpec spec = make_spec(a);
    const int k = parse_k(a.k);
    if (a.kmax < 1) throw UsageError("--kmax must be positive");
    const Model m = make_binomial(a.n);
    const PriorPredictive r = beta_binomial_predictive(m, a.prior_a, a.prior_b);
    SolverConfig cfg;
    cfg.k_max = a.kmax;
    const FitResult fit = fit_codebook(m, r, spec, k, cfg);
    const CodebookReport rep = make_report(m, r, spec, fit);
    Sink sink(a.out);
    *sink.os << to_json(rep).dump(2) << '\n';
    if (!table_path.empty()) {
        std::ofstream tf(table_path, std::ios::binary);
        if (!tf) throw std::runtime_error("cannot open " + table_path);
        write_fit_table_csv(tf, rep, a.bits);
    }
    return 0;
}

inline int run_sweep(const FitArgs& a, const std::string& taus_text, bool fixed_codebook) {
    const auto taus = parse_tau_list(taus_text);
    if (a.model != "binomial") throw UsageError("unknown model: " + a.model);
    const int k = parse_k(a.k);
    if (a.kmax < 1) throw UsageError("--kmax must be positive");
    const Model m = make_binomial(a.n);
    const PriorPredictive r = beta_binomial_predictive(m, a.prior_a, a.prior_b);
    SolverConfig cfg;
    cfg.k_max = a.kmax;

    std::vector<SweepRow> rows;
    FitResult fixed;
    if (fixed_codebook) {
        FitArgs base = a;
        if (base.criterion.empty()) base.criterion = "ordinary";
        fixed = fit_codebook(m, r, make_spec(base), k, cfg);
    }
    for (const double tau : taus) {
        const FitResult fit = fixed_codebook
                                  ? fixed
                                  : fit_codebook(m, r, CriterionSpec::entropic(tau), k, cfg);
        SweepRow row;
        row.tau = tau;
        row.objective = fixed_codebook ? entropic_objective(fit.codebook, m, r, tau)
                                       : fit.objective;
        row.ordinary = ordinary_objective(fit.codebook, m, r);
        row.worst_case = worst_case_codelength(fit.codebook, m, r).first;
        row.renyi_bound = renyi_entropy(r, 1.0 / (1.0 + tau));
        row.k = fit.k;
        rows.push_back(row);
    }
    Sink sink(a.out);
    write_sweep_csv(*sink.os, rows, a.bits);
    return 0;
}

inline int run_nml(const std::string& model, int n, const std::string& out, bool bits) {
    if (model != "binomial") throw UsageError("unknown model: " + model);
    const Model m = make_binomial(n);
    const RegretProfile profile = nml_distribution(m);
    Sink sink(out);
    *sink.os << nml_to_json(m, profile, bits).dump(2) << '\n';
    return 0;
}

inline int run_regimes(const std::string& schedule_text, const std::string& ns_text,
                       double prior_a, double prior_b, const std::string& k_text, int kmax,
                       const std::string& out, bool bits) {
    Schedule schedule;
    try {
        schedule = Schedule::parse(schedule_text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto ns = parse_range(ns_text);
    const int k = parse_k(k_text);
    if (kmax < 1) throw UsageError("--kmax must be positive");
    SolverConfig cfg;
    cfg.k_max = kmax;
    const RegimeSweep sweep = run_regime_sweep(schedule, ns, prior_a, prior_b, k, cfg);
    Sink sink(out);
    write_regimes_csv(*sink.os, sweep, bits);
    return 0;
}

inline int run_verify(std::uint64_t seed, const std::string& sizes_text) {
    std::vector<int> sizes{2, 5, 12, 20, 50};
    if (!sizes_text.empty()) {
        sizes = parse_int_list(sizes_text, "--sizes");
        for (const int n : sizes)
            if (n < 2 || n > 50) throw UsageError("--sizes entries must lie in 2..50");
    }
    const InvariantReport report = run_invariant_suite(seed, sizes);
    std::cout << "invariant suite: seed=" << seed << " sizes=";
    for (std::size_t i = 0; i < sizes.size(); ++i)
        std::cout << (i ? "," : "") << sizes[i];
    std::cout << '\n';
    for (const auto& res : report.results) {
        std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.name;
        if (!res.pass) std::cout << "  (violation " << res.violation << ")";
        std::cout << '\n';
    }
    return report.all_pass() ? 0 : 1;
}

}  // namespace detail

inline int dispatch(std::vector<std::string> args) {
    CLI::App app{"two-part codebooks under the entropic SMML criterion"};
    app.require_subcommand(1);

    detail::FitArgs fit_args;
    std::string fit_table;
    auto* fit = app.add_subcommand("fit", "fit a codebook and export it");
    detail::add_fit_flags(fit, fit_args, true);
    fit->add_option("--table", fit_table, "per-point CSV path");

    detail::FitArgs sweep_args;
    std::string sweep_taus;
    bool sweep_fixed = false;
    auto* sweep = app.add_subcommand("sweep", "evaluate criteria across tau");
    detail::add_fit_flags(sweep, sweep_args, false);
    sweep->add_option("--taus", sweep_taus, "comma-separated positive taus")->required();
    sweep->add_flag("--fixed-codebook", sweep_fixed, "fit once, evaluate at every tau");

    std::string nml_model = "binomial", nml_out;
    int nml_n = 0;
    bool nml_bits = false;
    auto* nml = app.add_subcommand("nml", "normalized maximum likelihood summary");
    nml->add_option("--model", nml_model, "model family");
    nml->add_option("--n", nml_n, "number of trials")->required();
    nml->add_option("--out", nml_out, "output JSON path (stdout when absent)");
    nml->add_flag("--bits", nml_bits, "report codelengths in bits");

    std::string reg_schedule, reg_ns, reg_k = "auto", reg_out;
    double reg_a = 1.0, reg_b = 1.0;
    int reg_kmax = 32;
    bool reg_bits = false;
    auto* regimes = app.add_subcommand("regimes", "joint n-tau regime sweep");
    regimes->add_option("--schedule", reg_schedule, "tau schedule, name:param")->required();
    regimes->add_option("--ns", reg_ns, "n range, lo:hi:step")->required();
    regimes->add_option("--prior-a", reg_a, "Beta prior shape a");
    regimes->add_option("--prior-b", reg_b, "Beta prior shape b");
    regimes->add_option("--k", reg_k, "codebook size, 'auto' or a positive integer");
    regimes->add_option("--kmax", reg_kmax, "largest k tried when --k auto");
    regimes->add_option("--out", reg_out, "output CSV path (stdout when absent)");
    regimes->add_flag("--bits", reg_bits, "report codelengths in bits");

    std::uint64_t verify_seed = 0;
    std::string verify_sizes;
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--seed", verify_seed, "RNG seed")->required();
    verify->add_option("--sizes", verify_sizes, "comma-separated support sizes (2..50)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fit) return detail::run_fit(fit_args, fit_table);
        if (*sweep) return detail::run_sweep(sweep_args, sweep_taus, sweep_fixed);
        if (*nml) return detail::run_nml(nml_model, nml_n, nml_out, nml_bits);
        if (*regimes)
            return detail::run_regimes(reg_schedule, reg_ns, reg_a, reg_b, reg_k, reg_kmax,
                                       reg_out, reg_bits);
        if (*verify) return detail::run_verify(verify_seed, verify_sizes);
    } catch (const detail::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace esmml::cli
