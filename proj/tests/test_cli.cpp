#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <esmml/cli.hpp>
#include <esmml/report.hpp>

using namespace esmml;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    RunResult res;
    res.code = cli::dispatch(args);
    std::cout.rdbuf(old);
    res.out = captured.str();
    return res;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("esmml_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({"fit", "--n", "2", "--criterion", "entropic", "--k", "1"}).code == 2);
    CHECK(run({"fit", "--n", "2", "--criterion", "entropic", "--tau", "-1", "--k", "1"}).code == 2);
    CHECK(run({"fit", "--n", "2", "--criterion", "ordinary", "--tau", "1", "--k", "1"}).code == 2);
    CHECK(run({"fit", "--n", "2", "--criterion", "bogus", "--k", "1"}).code == 2);
    CHECK(run({"fit", "--criterion", "ordinary"}).code == 2);
    CHECK(run({"fit", "--n", "2", "--criterion", "ordinary", "--k", "zero"}).code == 2);
    CHECK(run({"fit", "--n", "2", "--model", "poisson", "--criterion", "ordinary"}).code == 2);
    CHECK(run({"sweep", "--n", "2", "--taus", "0.1,-3"}).code == 2);
    CHECK(run({"regimes", "--schedule", "zipf:1", "--ns", "10:20:10"}).code == 2);
    CHECK(run({"regimes", "--schedule", "constant:1", "--ns", "10-20"}).code == 2);
    CHECK(run({"verify", "--sizes", "2,5"}).code == 2);
    CHECK(run({"verify", "--seed", "1", "--sizes", "2,99"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("help exits zero") {
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("fit closed-form objectives land in the JSON") {
    const RunResult ord = run({"fit", "--n", "2", "--criterion", "ordinary", "--k", "1"});
    REQUIRE(ord.code == 0);
    const auto j = nlohmann::ordered_json::parse(ord.out);
    CHECK(j["objective_nats"].get<double>() ==
          Catch::Approx(5.0 / 3.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(j["objective_bits"].get<double>() ==
          Catch::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(j["k"].get<int>() == 1);
    CHECK(j["converged"].get<bool>());
    CHECK(j["model"]["prior_a"].get<double>() == 1.0);

    const RunResult ent =
        run({"fit", "--n", "2", "--criterion", "entropic", "--tau", "1", "--k", "1"});
    REQUIRE(ent.code == 0);
    CHECK(nlohmann::ordered_json::parse(ent.out)["objective_nats"].get<double>() ==
          Catch::Approx(std::log(10.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("fit writes lossless JSON and exact CSV") {
    const auto json_path = temp_file("fit.json");
    const auto csv_path = temp_file("fit.csv");
    const RunResult res = run({"fit", "--model", "binomial", "--n", "50", "--prior-a", "1",
                               "--prior-b", "1", "--criterion", "ordinary", "--k", "auto",
                               "--out", json_path.string(), "--table", csv_path.string()});
    REQUIRE(res.code == 0);

    const auto j = nlohmann::ordered_json::parse(slurp(json_path));
    const CodebookReport rep = report_from_json(j);
    CHECK(reports_equal(rep, report_from_json(to_json(rep))));
    CHECK(to_json(rep).dump(2) == j.dump(2));
    CHECK(rep.k == 7);
    CHECK(rep.table.size() == 51);

    const std::string csv = slurp(csv_path);
    CHECK(csv.find('\r') == std::string::npos);
    const auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 52);
    CHECK(rows[0] == std::vector<std::string>{"x", "lambda", "lambda_ml", "neg_log_r", "regret"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 5);
        const double lambda = std::stod(rows[i][1]);
        const double lambda_ml = std::stod(rows[i][2]);
        const double regret = std::stod(rows[i][4]);
        CHECK(std::stod(rows[i][3]) == Catch::Approx(std::log(51.0)).epsilon(1e-11));
        CHECK(regret >= 0.0);
        CHECK(lambda == Catch::Approx(lambda_ml + regret).epsilon(1e-9));
        // 12 significant digits survive the round trip
        CHECK(std::abs(lambda - rep.table[i - 1].lambda) <=
              1e-11 * std::max(1.0, std::abs(rep.table[i - 1].lambda)));
    }
    std::filesystem::remove(json_path);
    std::filesystem::remove(csv_path);
}

TEST_CASE("bits flag rescales codelength columns only") {
    const auto nats_path = temp_file("nats.csv");
    const auto bits_path = temp_file("bits.csv");
    REQUIRE(run({"fit", "--n", "10", "--criterion", "ordinary", "--k", "3", "--out",
                 temp_file("nats.json").string(), "--table", nats_path.string()})
                .code == 0);
    REQUIRE(run({"fit", "--n", "10", "--criterion", "ordinary", "--k", "3", "--bits", "--out",
                 temp_file("bits.json").string(), "--table", bits_path.string()})
                .code == 0);
    const auto nats = parse_csv(slurp(nats_path));
    const auto bits = parse_csv(slurp(bits_path));
    REQUIRE(nats.size() == bits.size());
    for (std::size_t i = 1; i < nats.size(); ++i) {
        CHECK(std::stod(bits[i][1]) ==
              Catch::Approx(std::stod(nats[i][1]) / std::log(2.0)).epsilon(1e-10));
        CHECK(bits[i][0] == nats[i][0]);
    }
    for (const auto& name : {"nats.csv", "bits.csv", "nats.json", "bits.json"})
        std::filesystem::remove(temp_file(name));
}

TEST_CASE("sweep over a fixed single-cell codebook matches the stated column") {
    const RunResult res = run({"sweep", "--n", "2", "--k", "1", "--fixed-codebook", "--taus",
                               "0.001,1,1000"});
    REQUIRE(res.code == 0);
    const auto rows = parse_csv(res.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] ==
          std::vector<std::string>{"tau", "objective", "ordinary", "worst_case", "renyi_bound",
                                   "k"});
    const double mean = 5.0 / 3.0 * std::log(2.0);
    const double var = 2.0 / 9.0 * std::log(2.0) * std::log(2.0);
    CHECK(std::stod(rows[1][1]) == Catch::Approx(mean + 0.5e-3 * var).margin(1e-7).epsilon(0.0));
    CHECK(std::stod(rows[2][1]) == Catch::Approx(std::log(10.0 / 3.0)).epsilon(1e-10));
    CHECK(std::stod(rows[3][1]) ==
          Catch::Approx(std::log(4.0)).margin(std::log(3.0) / 1000.0 + 1e-12).epsilon(0.0));
    double prev = 0.0;
    for (int i = 1; i <= 3; ++i) {
        const double objective = std::stod(rows[i][1]);
        // 12 significant digits in the file: half a quantum of slack on parse-back
        CHECK(std::stod(rows[i][4]) == Catch::Approx(std::log(3.0)).margin(1e-11).epsilon(0.0));
        CHECK(std::stod(rows[i][2]) <= objective + 1e-12);
        CHECK(objective <= std::stod(rows[i][3]) + 1e-12);
        CHECK(rows[i][5] == "1");
        CHECK(objective >= prev - 1e-12);
        prev = objective;
    }
}

TEST_CASE("refitting sweep keeps the optimal objective monotone") {
    const RunResult res =
        run({"sweep", "--n", "10", "--k", "auto", "--taus", "0.01,0.1,1,10"});
    REQUIRE(res.code == 0);
    const auto rows = parse_csv(res.out);
    REQUIRE(rows.size() == 5);
    double prev = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double objective = std::stod(rows[i][1]);
        CHECK(std::stod(rows[i][2]) <= objective + 1e-12);
        CHECK(objective <= std::stod(rows[i][3]) + 1e-12);
        CHECK(objective >= prev - 1e-12);
        prev = objective;
    }
}

TEST_CASE("nml command emits the closed-form summary") {
    const RunResult res = run({"nml", "--n", "2"});
    REQUIRE(res.code == 0);
    const auto j = nlohmann::ordered_json::parse(res.out);
    CHECK(j["log_S_n"].get<double>() == Catch::Approx(std::log(2.5)).epsilon(1e-13));
    REQUIRE(j["Q"].size() == 3);
    CHECK(j["Q"][0].get<double>() == Catch::Approx(0.4).epsilon(1e-12));
    CHECK(j["Q"][1].get<double>() == Catch::Approx(0.2).epsilon(1e-12));
    CHECK(j["regret_spread"].get<double>() <= 1e-12);

    const RunResult r1 = run({"nml", "--n", "1"});
    REQUIRE(r1.code == 0);
    CHECK(nlohmann::ordered_json::parse(r1.out)["log_S_n"].get<double>() ==
          Catch::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("regimes command emits the documented CSV") {
    const RunResult res =
        run({"regimes", "--schedule", "c_over_logn:0.5", "--ns", "10:30:10"});
    REQUIRE(res.code == 0);
    const auto rows = parse_csv(res.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] ==
          std::vector<std::string>{"n", "tau", "I", "mean", "sup", "gap_mean", "gap_sup"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 7);
        CHECK(std::stod(rows[i][5]) >= -1e-12);
        CHECK(std::stod(rows[i][6]) >= -1e-12);
        const double n = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == Catch::Approx(0.5 / std::log(n)).epsilon(1e-10));
    }
}

TEST_CASE("verify passes on seed 42 with reduced sizes") {
    const RunResult res = run({"verify", "--seed", "42", "--sizes", "2,5,12"});
    CHECK(res.code == 0);
    CHECK(res.out.find("[PASS]") != std::string::npos);
    CHECK(res.out.find("[FAIL]") == std::string::npos);
}
