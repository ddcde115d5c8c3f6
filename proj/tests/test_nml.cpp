#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <esmml/model.hpp>
#include <esmml/nml.hpp>
#include <esmml/numerics.hpp>
#include <esmml/optimize.hpp>

using namespace esmml;

TEST_CASE("shtarkov sums") {
    CHECK(shtarkov_sum(make_binomial(1)) == Catch::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(shtarkov_sum(make_binomial(2)) == Catch::Approx(std::log(2.5)).epsilon(1e-14));

    // high-precision direct summation oracle at n=50, accumulated in
    // descending-magnitude-agnostic long double arithmetic
    const int n = 50;
    long double s = 0.0L;
    for (int x = 0; x <= n; ++x) {
        long double term = std::exp(std::lgamma(n + 1.0L) - std::lgamma(x + 1.0L) -
                                    std::lgamma(n - x + 1.0L));
        if (x > 0) term *= std::pow(static_cast<long double>(x) / n, static_cast<long double>(x));
        if (x < n)
            term *= std::pow(static_cast<long double>(n - x) / n, static_cast<long double>(n - x));
        s += term;
    }
    CHECK(shtarkov_sum(make_binomial(50)) ==
          Catch::Approx(static_cast<double>(std::log(s))).margin(1e-12).epsilon(0.0));
}

TEST_CASE("nml distribution has constant regret") {
    const Model m2 = make_binomial(2);
    const RegretProfile p2 = nml_distribution(m2);
    CHECK(std::exp(p2.log_Q[0]) == Catch::Approx(0.4).epsilon(1e-13));
    CHECK(std::exp(p2.log_Q[1]) == Catch::Approx(0.2).epsilon(1e-13));
    CHECK(std::exp(p2.log_Q[2]) == Catch::Approx(0.4).epsilon(1e-13));
    for (const double reg : p2.regret)
        CHECK(reg == Catch::Approx(std::log(2.5)).epsilon(1e-13));

    const RegretProfile p1 = nml_distribution(make_binomial(1));
    CHECK(std::exp(p1.log_Q[0]) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(std::exp(p1.log_Q[1]) == Catch::Approx(0.5).epsilon(1e-14));

    for (int n = 1; n <= 200; ++n) {
        const RegretProfile p = nml_distribution(make_binomial(n));
        double lo = pos_inf, hi = neg_inf;
        for (const double reg : p.regret) {
            lo = std::min(lo, reg);
            hi = std::max(hi, reg);
        }
        CHECK(hi - lo <= 1e-12);
        CHECK(p.sup_regret == hi);
    }
}

TEST_CASE("no coding distribution beats the shtarkov bound") {
    rng gen(321);
    for (int n = 2; n <= 20; ++n) {
        const Model m = make_binomial(n);
        const double log_s = shtarkov_sum(m);
        for (int rep = 0; rep < 1000; ++rep) {
            const auto probs = gen.dirichlet(m.support_size);
            const double shrink = 0.2 + 0.8 * gen.u01();
            std::vector<double> log_q(m.support_size);
            for (int x = 0; x < m.support_size; ++x) log_q[x] = std::log(probs[x] * shrink);
            CHECK(regret_profile(m, log_q).sup_regret >= log_s - 1e-12);
        }
    }
}

TEST_CASE("regret-entropic aggregate") {
    const Model m = make_binomial(8);
    const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
    const RegretProfile nml = nml_distribution(m);
    const double log_s = shtarkov_sum(m);
    for (const double tau : {1e-2, 0.3, 1.0, 1e3})
        CHECK(regret_entropic(nml, r.log_r, tau) == Catch::Approx(log_s).margin(1e-12).epsilon(0.0));
    // below tau ~ 1e-2 the identity still holds but its evaluation error is
    // dominated by the quantization of log_mu + tau*R divided back by tau
    CHECK(regret_entropic(nml, r.log_r, 1e-6) == Catch::Approx(log_s).margin(1e-9).epsilon(0.0));

    rng gen(99);
    const std::vector<double> log_uni(m.support_size, -std::log(m.support_size * 1.0));
    for (int rep = 0; rep < 30; ++rep) {
        const auto probs = gen.dirichlet(m.support_size);
        std::vector<double> log_q(m.support_size);
        for (int x = 0; x < m.support_size; ++x) log_q[x] = std::log(probs[x]);
        const RegretProfile p = regret_profile(m, log_q);

        // tau -> 0 mean limit
        double mean = 0.0;
        for (int x = 0; x < m.support_size; ++x)
            mean += std::exp(r.log_r[x]) * p.regret[x];
        CHECK(regret_entropic(p, r.log_r, 1e-6) == Catch::Approx(mean).margin(1e-5).epsilon(0.0));

        // tau -> infinity soft-max limit, and near mu-independence there
        const double j_uni = regret_entropic(p, log_uni, 1e3);
        const double j_r = regret_entropic(p, r.log_r, 1e3);
        CHECK(p.sup_regret - j_uni <= std::log(m.support_size * 1.0) / 1e3 + 1e-12);
        CHECK(j_uni <= p.sup_regret + 1e-12);
        CHECK(std::abs(j_uni - j_r) <= 2.0 * std::log(m.support_size * 1.0) / 1e3);
    }
}

TEST_CASE("codebook regret profile") {
    const Model m = make_binomial(2);
    const Codebook cb{Partition{{{0, 3}}}, {0.5}, {0.0}};
    const RegretProfile p = codebook_regret(cb, m);
    CHECK(p.regret[0] == Catch::Approx(std::log(4.0)).epsilon(1e-13));
    CHECK(p.regret[1] == Catch::Approx(0.0).margin(1e-14).epsilon(0.0));
    CHECK(p.regret[2] == Catch::Approx(std::log(4.0)).epsilon(1e-13));

    // single-point support: regret vanishes identically
    Model point;
    point.support_size = 1;
    point.n_trials = 0;
    point.log_h = {0.0};
    point.t_stat = {0.0};
    point.log_partition = [](double) { return 0.0; };
    point.mean_map = [](double nu) { return sigmoid(nu); };
    point.natural_param = [](double theta) { return std::log(theta / (1.0 - theta)); };
    const Codebook cbp{Partition{{{0, 1}}}, {0.0}, {0.0}};
    CHECK(codebook_regret(cbp, point).regret[0] == Catch::Approx(0.0).margin(1e-14).epsilon(0.0));

    // fitted codebooks never undercut the ML code
    for (const int n : {10, 30, 50}) {
        const Model mn = make_binomial(n);
        const PriorPredictive rn = beta_binomial_predictive(mn, 1.0, 1.0);
        for (const CriterionSpec spec : {CriterionSpec::ordinary(), CriterionSpec::entropic(1.0),
                                         CriterionSpec::worst_case()}) {
            const FitResult fit = fit_codebook(mn, rn, spec, 0);
            const RegretProfile prof = codebook_regret(fit.codebook, mn);
            for (const double reg : prof.regret) CHECK(reg >= -1e-12);
        }
    }
}

TEST_CASE("endpoint chain for the fitted worst-case codebook") {
    for (const int n : {5, 12, 25}) {
        const Model m = make_binomial(n);
        const PriorPredictive r = beta_binomial_predictive(m, 1.0, 1.0);
        const FitResult fit = fit_codebook(m, r, CriterionSpec::worst_case(), 0);
        const RegretProfile prof = codebook_regret(fit.codebook, m);
        double chain = neg_inf;
        for (int x = 0; x < m.support_size; ++x)
            chain = std::max(chain, -log_ml_pmf(m, x) + prof.regret[x]);
        CHECK(worst_case_codelength(fit.codebook, m, r).first ==
              Catch::Approx(chain).margin(1e-10).epsilon(0.0));
    }
}
