#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gammareg/cli.hpp"

using namespace gammareg;

namespace {

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_temp(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

// Simulated gamma-regression CSV with two covariates, no intercept needed.
std::string make_sim_csv(uint64_t seed, int n) {
    RngStream rng(seed, 0);
    std::string csv = "y,x1,x2\n";
    for (int i = 0; i < n; ++i) {
        const double x1 = rng.normal();
        const double x2 = rng.normal();
        const double mu = std::exp(0.5 * x1 - 0.3 * x2);
        const double y = rng.gamma(4.0, mu * 0.25);
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", y, x1, x2);
        csv += buf;
    }
    return csv;
}

} // namespace

TEST_CASE("load_csv round-trips a toy file exactly") {
    write_temp("cli_toy.csv", "y,a,b\n1.5,2.25,-3\n0.125,4.5,6\n7,8,9.75\n2,1,0.5\n");
    const Dataset data = cli::load_csv("cli_toy.csv", "y", {"a", "b"}, false);
    CHECK(data.n() == 4);
    CHECK(data.p() == 2);
    CHECK(data.y[0] == 1.5);
    CHECK(data.y[1] == 0.125);
    CHECK(data.X(0, 0) == 2.25);
    CHECK(data.X(0, 1) == -3.0);
    CHECK(data.X(2, 1) == 9.75);

    // intercept expansion and implicit covariate selection
    const Dataset with_icpt = cli::load_csv("cli_toy.csv", "y", {}, true);
    CHECK(with_icpt.p() == 3);
    CHECK(with_icpt.column_names[0] == "intercept");
    CHECK(with_icpt.X(1, 0) == 1.0);
    std::remove("cli_toy.csv");
}

TEST_CASE("load_csv rejects saturated shapes and validates at load") {
    // n = p after intercept expansion: the load-time n > p rule fires
    write_temp("cli_sat.csv", "y,a,b\n1.5,2.0,3.0\n2.5,1.0,4.0\n3.5,2.0,1.0\n");
    CHECK_THROWS_AS(cli::load_csv("cli_sat.csv", "y", {"a", "b"}, true), IngestionError);
    CHECK_NOTHROW(cli::load_csv("cli_sat.csv", "y", {"a", "b"}, false));
    std::remove("cli_sat.csv");
}

TEST_CASE("body-fat fixture loads with the documented shape") {
    const Dataset data = cli::load_csv(
        std::string(GAMMAREG_DATA_DIR) + "/bodyfat.csv", "DEXfat",
        {"age", "waistcirc", "hipcirc", "elbowbreadth", "kneebreadth", "anthro3a",
         "anthro3b", "anthro3c", "anthro4"},
        true);
    CHECK(data.n() == 71);
    CHECK(data.p() == 10);
    CHECK(data.column_names[0] == "intercept");
    CHECK(data.column_names[3] == "hipcirc");
    for (double v : data.y) CHECK(v > 0.0);
}

TEST_CASE("load_csv handles quoted fields") {
    write_temp("cli_quoted.csv", "\"y\",\"a\"\n\"1.5\",\"2.5\"\n3,4\n");
    const Dataset data = cli::load_csv("cli_quoted.csv", "y", {"a"}, false);
    CHECK(data.y[0] == 1.5);
    CHECK(data.X(1, 0) == 4.0);
    std::remove("cli_quoted.csv");
}

TEST_CASE("load_csv typed ingestion errors") {
    CHECK_THROWS_AS(cli::load_csv("no_such_file.csv", "y", {}, true), IngestionError);

    write_temp("cli_bad.csv", "y,a\n1.0,2.0\n3.0,oops\n");
    try {
        cli::load_csv("cli_bad.csv", "y", {"a"}, false);
        FAIL("expected IngestionError");
    } catch (const IngestionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("'a'") != std::string::npos);
    }

    CHECK_THROWS_AS(cli::load_csv("cli_bad.csv", "nope", {}, true), IngestionError);

    write_temp("cli_zero.csv", "y,a\n1.0,2.0\n0.0,3.0\n");
    try {
        cli::load_csv("cli_zero.csv", "y", {"a"}, false);
        FAIL("expected IngestionError");
    } catch (const IngestionError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    std::remove("cli_bad.csv");
    std::remove("cli_zero.csv");
}

TEST_CASE("build_restrictions: named, dense and ge rows") {
    const std::vector<std::string> cols{"intercept", "age", "hip"};

    cli::RestrictionRow named;
    named.named = {{"age", 1.0}};
    named.bound = 0.5;
    named.sense = "le"; // age <= 0.5

    cli::RestrictionRow ge;
    ge.named = {{"hip", 1.0}};
    ge.bound = 0.0;
    ge.sense = "ge"; // hip >= 0 stored as -hip <= 0

    cli::RestrictionRow dense;
    dense.dense = {1.0, -1.0}; // covariates only: age - hip <= 2
    dense.bound = 2.0;

    const LinearRestrictions res = cli::build_restrictions({named, ge, dense}, cols, true);
    CHECK(res.m() == 3);
    CHECK(satisfies(res, {5.0, 0.2, 0.1}));  // age .2<=.5, hip .1>=0, .2-.1<=2
    CHECK(!satisfies(res, {0.0, 0.6, 0.1})); // age bound broken
    CHECK(!satisfies(res, {0.0, 0.2, -0.1})); // hip sign broken

    cli::RestrictionRow unknown;
    unknown.named = {{"nope", 1.0}};
    CHECK_THROWS_AS(cli::build_restrictions({unknown}, cols, true), IngestionError);

    cli::RestrictionRow wrong_len;
    wrong_len.dense = {1.0};
    CHECK_THROWS_AS(cli::build_restrictions({wrong_len}, cols, true), IngestionError);
}

TEST_CASE("ge/le round trip on random systems") {
    RngStream rng(300, 0);
    const std::vector<std::string> cols{"a", "b", "c"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<cli::RestrictionRow> rows;
        const int m = 1 + static_cast<int>(rng.uniform() * 4);
        for (int i = 0; i < m; ++i) {
            cli::RestrictionRow row;
            row.dense = {rng.normal(), rng.normal(), rng.normal()};
            row.bound = rng.normal();
            row.sense = rng.uniform() < 0.5 ? "le" : "ge";
            rows.push_back(row);
        }
        const LinearRestrictions res = cli::build_restrictions(rows, cols, false);

        const Vector beta{rng.normal(), rng.normal(), rng.normal()};
        bool user_ok = true;
        for (const auto& row : rows) {
            double lhs = 0.0;
            for (int j = 0; j < 3; ++j) lhs += row.dense[static_cast<size_t>(j)] * beta[static_cast<size_t>(j)];
            if (row.sense == "le" ? (lhs > row.bound + 1e-12) : (lhs < row.bound - 1e-12))
                user_ok = false;
        }
        CHECK(satisfies(res, beta) == user_ok);
    }
}

TEST_CASE("config parsing") {
    const std::string text = R"({
        "command": "fit",
        "data": "bodyfat.csv",
        "response": "DEXfat",
        "covariates": ["age", "hipcirc"],
        "intercept": true,
        "zeta": 0.02,
        "estimators": ["MLE", "BEGRC"],
        "restrictions": [{"coeffs": {"hipcirc": 1.0}, "bound": 0, "sense": "ge"}],
        "mcmc": {"n_iter": 5000, "burn_in": 500, "proposal_mode": "exact-indicator-rw"},
        "seed": 17,
        "output": {"path": "out.csv", "format": "csv"}
    })";
    const cli::RunConfig c = cli::config_from_json_text(text);
    CHECK(c.command == "fit");
    CHECK(c.response == "DEXfat");
    CHECK(c.covariates.size() == 2);
    CHECK(c.intercept);
    CHECK(*c.zeta == 0.02);
    CHECK(c.estimators.size() == 2);
    CHECK(c.restrictions.size() == 1);
    CHECK(c.mcmc.n_iter == 5000);
    CHECK(c.mcmc.proposal_mode == "exact-indicator-rw");
    CHECK(c.seed == 17);
    CHECK(c.output_path == "out.csv");

    CHECK_THROWS_AS(cli::config_from_json_text("{"), IngestionError);
    CHECK_THROWS_AS(cli::config_from_json_text(R"({"zeta": -1})"), IngestionError);
    CHECK_THROWS_AS(cli::config_from_json_text(R"({"format": "xml"})"), IngestionError);
    CHECK_THROWS_AS(
        cli::config_from_json_text(R"({"restrictions": [{"coeffs": [1], "sense": "up"}]})"),
        IngestionError);
}

TEST_CASE("cmd_fit MLE-only matches the library fit exactly") {
    write_temp("cli_fit.csv", make_sim_csv(42, 80));

    cli::RunConfig config;
    config.command = "fit";
    config.data_path = "cli_fit.csv";
    config.response = "y";
    config.intercept = false;
    config.zeta = 0.25;
    config.estimators = {"MLE"};
    config.output_path = "cli_fit_out.csv";
    REQUIRE(cli::run(config) == 0);

    const Dataset data = cli::load_csv("cli_fit.csv", "y", {}, false);
    Dataset with_zeta = data;
    with_zeta.zeta = 0.25;
    const FitResult fit = fit_mle(with_zeta);

    const std::string out = slurp_file("cli_fit_out.csv");
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "estimator,coef,estimate,se");
    for (int j = 0; j < 2; ++j) {
        REQUIRE(static_cast<bool>(std::getline(lines, line)));
        char expected[160];
        std::snprintf(expected, sizeof expected, "MLE,x%d,%.10g,%.10g", j + 1,
                      fit.beta_hat[static_cast<size_t>(j)],
                      fit.std_errors[static_cast<size_t>(j)]);
        CHECK(line == expected);
    }

    // manifest written alongside with config echo
    const std::string manifest = slurp_file("cli_fit_out.csv.manifest.json");
    const auto m = nlohmann::json::parse(manifest);
    CHECK(m["version"] == cli::kVersion);
    CHECK(m["command"] == "fit");
    CHECK(m["run"]["mle_mode"] == "paper-faithful");
    CHECK(m["run"]["zeta"]["source"] == "config");

    std::remove("cli_fit.csv");
    std::remove("cli_fit_out.csv");
    std::remove("cli_fit_out.csv.manifest.json");
}

TEST_CASE("cli::run maps errors to documented exit codes") {
    cli::RunConfig missing;
    missing.command = "fit";
    missing.data_path = "definitely_missing.csv";
    missing.response = "y";
    CHECK(cli::run(missing) == 2);

    cli::RunConfig unknown;
    unknown.command = "explode";
    CHECK(cli::run(unknown) == 2);

    write_temp("cli_run.csv", make_sim_csv(43, 40));
    cli::RunConfig no_restrictions;
    no_restrictions.command = "fit";
    no_restrictions.data_path = "cli_run.csv";
    no_restrictions.response = "y";
    no_restrictions.intercept = false;
    no_restrictions.zeta = 0.25;
    no_restrictions.estimators = {"BEGRC"};
    no_restrictions.mcmc.n_iter = 600;
    no_restrictions.mcmc.burn_in = 100;
    CHECK(cli::run(no_restrictions) == 3);
    std::remove("cli_run.csv");
}

TEST_CASE("cmd_simulate smoke grid: deterministic outputs and manifest") {
    cli::RunConfig config;
    config.command = "simulate";
    config.seed = 99;
    config.sim_zetas = {0.25};
    config.sim_ns = {25};
    config.sim_rhos = {0.8};
    config.sim_replications = 4;
    config.estimators = {"MLE", "GRE1", "GRE2"};
    config.output_path = "cli_sim_a.csv";
    config.threads = 1;
    REQUIRE(cli::run(config) == 0);

    config.output_path = "cli_sim_b.csv";
    config.threads = 2;
    REQUIRE(cli::run(config) == 0);

    const std::string a = slurp_file("cli_sim_a.csv");
    const std::string b = slurp_file("cli_sim_b.csv");
    CHECK(a == b); // byte-identical across thread counts

    size_t lines = 0;
    for (char c : a) lines += (c == '\n');
    CHECK(lines == 1 + 3); // header + one row per estimator

    CHECK(slurp_file("cli_sim_a_sd_bias.csv") == slurp_file("cli_sim_b_sd_bias.csv"));
    const auto manifest = nlohmann::json::parse(slurp_file("cli_sim_a.csv.manifest.json"));
    CHECK(manifest["seed"] == 99);
    CHECK(manifest["config"]["grid"]["replications"] == 4);

    for (const char* f : {"cli_sim_a.csv", "cli_sim_b.csv", "cli_sim_a_sd_bias.csv",
                          "cli_sim_b_sd_bias.csv", "cli_sim_a.csv.manifest.json",
                          "cli_sim_b.csv.manifest.json"})
        std::remove(f);
}

TEST_CASE("cmd_fit via config: restricted fit respects the sign pattern") {
    const std::string config_text = std::string(R"({
        "command": "fit",
        "data": ")") + GAMMAREG_DATA_DIR + R"(/bodyfat.csv",
        "response": "DEXfat",
        "intercept": true,
        "estimators": ["MLE", "BEGRC"],
        "restrictions": [
            {"coeffs": {"anthro3a": 1.0}, "bound": 0, "sense": "le"},
            {"coeffs": {"anthro3b": 1.0}, "bound": 0, "sense": "ge"},
            {"coeffs": {"anthro3c": 1.0}, "bound": 0, "sense": "ge"},
            {"coeffs": {"anthro4": 1.0}, "bound": 0, "sense": "ge"}
        ],
        "mcmc": {"n_iter": 1500, "burn_in": 300},
        "seed": 3,
        "output": {"path": "cli_restricted.csv"}
    })";
    cli::RunConfig config = cli::config_from_json_text(config_text);
    REQUIRE(cli::run(config) == 0);

    const std::string out = slurp_file("cli_restricted.csv");
    std::istringstream lines(out);
    std::string line;
    double anthro3a = 1.0, anthro3b = -1.0, anthro3c = -1.0, anthro4 = -1.0;
    while (std::getline(lines, line)) {
        if (line.rfind("BEGRC,", 0) != 0) continue;
        std::istringstream fields(line);
        std::string est, coef, value;
        std::getline(fields, est, ',');
        std::getline(fields, coef, ',');
        std::getline(fields, value, ',');
        if (coef == "anthro3a") anthro3a = std::stod(value);
        if (coef == "anthro3b") anthro3b = std::stod(value);
        if (coef == "anthro3c") anthro3c = std::stod(value);
        if (coef == "anthro4") anthro4 = std::stod(value);
    }
    CHECK(anthro3a <= 1e-12);
    CHECK(anthro3b >= -1e-12);
    CHECK(anthro3c >= -1e-12);
    CHECK(anthro4 >= -1e-12);

    std::remove("cli_restricted.csv");
    std::remove("cli_restricted.csv.manifest.json");
}

TEST_CASE("cmd_simulate full grid shape at one replication") {
    cli::RunConfig config;
    config.command = "simulate";
    config.seed = 5;
    config.sim_replications = 1;
    config.estimators = {}; // command default: all five estimators
    config.mcmc.n_iter = 400;
    config.mcmc.burn_in = 100;
    config.output_path = "cli_grid_shape.csv";
    REQUIRE(cli::run(config) == 0);

    const std::string out = slurp_file("cli_grid_shape.csv");
    size_t lines = 0;
    for (char c : out) lines += (c == '\n');
    // header + (2 zetas x 4 ns x 4 rhos) cells x 5 estimators
    CHECK(lines == 1 + 32 * 5);

    std::remove("cli_grid_shape.csv");
    std::remove("cli_grid_shape_sd_bias.csv");
    std::remove("cli_grid_shape.csv.manifest.json");
}

TEST_CASE("cmd_diagnose on an uncorrelated design") {
    // rho = 0 design: near-identity correlation matrix
    RngStream rng(301, 0);
    std::string csv = "y,x1,x2,x3\n";
    for (int i = 0; i < 120; ++i) {
        const double x1 = rng.normal(), x2 = rng.normal(), x3 = rng.normal();
        const double mu = std::exp(0.3 * x1 + 0.2 * x2 - 0.1 * x3);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n",
                      rng.gamma(4.0, mu * 0.25), x1, x2, x3);
        csv += buf;
    }
    write_temp("cli_diag.csv", csv);

    cli::RunConfig config;
    config.command = "diagnose";
    config.data_path = "cli_diag.csv";
    config.response = "y";
    config.intercept = true;
    config.seed = 7;
    config.bootstrap_reps = 200;
    config.format = "json";
    config.output_path = "cli_diag.json";
    REQUIRE(cli::run(config) == 0);

    const auto report = nlohmann::json::parse(slurp_file("cli_diag.json"));
    CHECK(report["ad_statistic"].get<double>() >= 0.0);
    CHECK(report["p_value"].get<double>() > 0.0);
    CHECK(report["condition_number_weighted"].get<double>() >= 1.0);
    CHECK(report["condition_number_unweighted"].get<double>() >= 1.0);

    const std::string corr = slurp_file("cli_diag_correlation.csv");
    std::istringstream lines(corr);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "x1,x2,x3");
    // diagonal ones, small off-diagonals
    for (int i = 0; i < 3; ++i) {
        std::string line;
        REQUIRE(static_cast<bool>(std::getline(lines, line)));
        std::istringstream fields(line);
        std::string cell;
        for (int j = 0; j < 3; ++j) {
            REQUIRE(static_cast<bool>(std::getline(fields, cell, ',')));
            const double v = std::stod(cell);
            if (i == j)
                CHECK(v == 1.0);
            else
                CHECK(std::abs(v) < 0.25);
        }
    }

    for (const char* f : {"cli_diag.csv", "cli_diag.json", "cli_diag_correlation.csv",
                          "cli_diag.json.manifest.json"})
        std::remove(f);
}
