#ifndef GAMMAREG_CLI_HPP
#define GAMMAREG_CLI_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gammareg/diagnostics.hpp"
#include "gammareg/simulation.hpp"

namespace gammareg::cli {

inline constexpr const char* kVersion = "0.1.0";

// One restriction row from the config: either named coefficients
// ({"hipcirc": 1.0, ...}) or a dense coefficient array.  "ge" rows are
// negated into <= form when the system is assembled.
struct RestrictionRow {
    std::map<std::string, double> named;
    std::vector<double> dense;
    double bound = 0.0;
    std::string sense = "le";
};

struct McmcSettings {
    int n_iter = 15000;
    int burn_in = 2000;
    std::string proposal_mode = "paper-faithful-tn";
    double proposal_scale = 1.0;
};

struct RunConfig {
    std::string command; // fit | simulate | diagnose

    // dataset ingestion
    std::string data_path;
    std::string response;
    std::vector<std::string> covariates; // empty: every non-response column
    bool intercept = true;
    std::optional<double> zeta; // absent: Pearson-dispersion estimate

    std::vector<std::string> estimators{"MLE"};
    std::vector<RestrictionRow> restrictions;
    McmcSettings mcmc;
    std::string mle_mode = "paper-faithful";
    uint64_t seed = 1;
    int threads = 0;
    int bootstrap_reps = 1000;

    std::string output_path; // empty: per-command default
    std::string format = "csv"; // csv | json

    // simulate-only grid spec
    std::vector<double> sim_zetas{0.25, 0.5};
    std::vector<int> sim_ns{25, 50, 100, 200};
    std::vector<double> sim_rhos{0.8, 0.9, 0.95, 0.99};
    std::vector<double> sim_beta_true{1.0, 1.0, 1.0, 1.0};
    int sim_replications = 100;
    double sim_restriction_bound = 0.8;
};

// Reads a config JSON document (the schema mirrors RunConfig).
RunConfig config_from_json_file(const std::string& path);
RunConfig config_from_json_text(const std::string& text);

// RFC-4180 CSV with a header row; numeric cells; optional all-ones intercept
// column prepended as "intercept".  Typed IngestionErrors carry row/column
// coordinates.
Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& covariates, bool intercept);

// Assembles R beta <= r over the dataset's columns; named rows are resolved
// against column names, dense rows against the covariate order (a zero is
// prepended for the intercept when only the covariates are given).
LinearRestrictions build_restrictions(const std::vector<RestrictionRow>& rows,
                                      const std::vector<std::string>& column_names,
                                      bool intercept);

int cmd_fit(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_diagnose(const RunConfig& config);

// Dispatches on config.command, mapping errors to the documented exit codes
// (2 ingestion, 3 convergence/feasibility) with a JSON diagnostic line on
// stderr.
int run(const RunConfig& config);

} // namespace gammareg::cli

#endif
