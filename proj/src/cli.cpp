#include "gammareg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace gammareg::cli {

using nlohmann::json;

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// --- CSV ---------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv_text(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    const auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    const auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
    };

    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                field += c;
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw IngestionError("csv: unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

double parse_cell(const std::string& cell, size_t row, const std::string& column) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || end != begin + cell.size() || !std::isfinite(v))
        throw IngestionError("csv: non-numeric cell at data row " + std::to_string(row + 1) +
                             ", column '" + column + "' (value '" + cell + "')");
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

// "foo.csv" + "_corr" -> "foo_corr.csv"
std::string derived_path(const std::string& path, const std::string& suffix) {
    const size_t dot = path.find_last_of('.');
    const size_t slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

// --- config -------------------------------------------------------------

template <typename T>
void read_into(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

} // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        read_into(j, "command", c.command);
        read_into(j, "data", c.data_path);
        read_into(j, "response", c.response);
        read_into(j, "covariates", c.covariates);
        read_into(j, "intercept", c.intercept);
        if (j.contains("zeta") && !j.at("zeta").is_null())
            c.zeta = j.at("zeta").get<double>();
        read_into(j, "estimators", c.estimators);
        read_into(j, "mle_mode", c.mle_mode);
        read_into(j, "seed", c.seed);
        read_into(j, "threads", c.threads);
        read_into(j, "bootstrap_reps", c.bootstrap_reps);
        read_into(j, "format", c.format);
        if (j.contains("output")) {
            const json& out = j.at("output");
            if (out.is_string()) {
                c.output_path = out.get<std::string>();
            } else {
                read_into(out, "path", c.output_path);
                read_into(out, "format", c.format);
            }
        }
        if (j.contains("mcmc")) {
            const json& m = j.at("mcmc");
            read_into(m, "n_iter", c.mcmc.n_iter);
            read_into(m, "burn_in", c.mcmc.burn_in);
            read_into(m, "proposal_mode", c.mcmc.proposal_mode);
            read_into(m, "proposal_scale", c.mcmc.proposal_scale);
        }
        if (j.contains("restrictions")) {
            for (const json& row : j.at("restrictions")) {
                RestrictionRow r;
                if (row.contains("coeffs")) {
                    const json& coeffs = row.at("coeffs");
                    if (coeffs.is_object())
                        r.named = coeffs.get<std::map<std::string, double>>();
                    else
                        r.dense = coeffs.get<std::vector<double>>();
                }
                read_into(row, "bound", r.bound);
                read_into(row, "sense", r.sense);
                if (r.sense != "le" && r.sense != "ge")
                    throw IngestionError("config: restriction sense must be 'le' or 'ge'");
                c.restrictions.push_back(std::move(r));
            }
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            read_into(g, "zetas", c.sim_zetas);
            read_into(g, "ns", c.sim_ns);
            read_into(g, "rhos", c.sim_rhos);
            read_into(g, "beta_true", c.sim_beta_true);
            read_into(g, "replications", c.sim_replications);
            read_into(g, "restriction_bound", c.sim_restriction_bound);
        }
    } catch (const json::exception& e) {
        throw IngestionError(std::string("config: ") + e.what());
    }
    if (c.zeta && !(*c.zeta > 0.0)) throw IngestionError("config: zeta must be positive");
    if (c.format != "csv" && c.format != "json")
        throw IngestionError("config: format must be 'csv' or 'json'");
    return c;
}

RunConfig config_from_json_file(const std::string& path) {
    return config_from_json_text(slurp(path));
}

Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& covariates, bool intercept) {
    const auto rows = parse_csv_text(slurp(path));
    if (rows.size() < 2) throw IngestionError("csv: need a header row and data rows: " + path);
    const std::vector<std::string>& header = rows.front();

    const auto column_index = [&](const std::string& name) -> size_t {
        for (size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw IngestionError("csv: column '" + name + "' not found in " + path);
    };

    if (response.empty()) throw IngestionError("csv: no response column configured");
    const size_t y_idx = column_index(response);

    std::vector<std::string> covs = covariates;
    if (covs.empty())
        for (const std::string& name : header)
            if (name != response) covs.push_back(name);
    std::vector<size_t> cov_idx;
    cov_idx.reserve(covs.size());
    for (const std::string& name : covs) cov_idx.push_back(column_index(name));

    const int n = static_cast<int>(rows.size() - 1);
    const int p = static_cast<int>(covs.size()) + (intercept ? 1 : 0);

    Dataset data;
    data.X = Matrix(n, p);
    data.y.resize(static_cast<size_t>(n));
    data.column_names.clear();
    if (intercept) data.column_names.push_back("intercept");
    for (const std::string& name : covs) data.column_names.push_back(name);

    for (int i = 0; i < n; ++i) {
        const std::vector<std::string>& row = rows[static_cast<size_t>(i) + 1];
        if (row.size() != header.size())
            throw IngestionError("csv: data row " + std::to_string(i + 1) + " has " +
                                 std::to_string(row.size()) + " fields, header has " +
                                 std::to_string(header.size()));
        const double y = parse_cell(row[y_idx], static_cast<size_t>(i), response);
        if (!(y > 0.0))
            throw IngestionError("csv: response must be strictly positive at data row " +
                                 std::to_string(i + 1));
        data.y[static_cast<size_t>(i)] = y;
        int col = 0;
        if (intercept) data.X(i, col++) = 1.0;
        for (size_t k = 0; k < cov_idx.size(); ++k)
            data.X(i, col + static_cast<int>(k)) =
                parse_cell(row[cov_idx[k]], static_cast<size_t>(i), covs[k]);
    }

    // Load-time validation: hard failures become ingestion errors, the rank
    // check stays warn-only (multicollinearity is expected input).
    std::string warning;
    try {
        validate_dataset(data, &warning);
    } catch (const Error& e) {
        throw IngestionError(std::string("csv: ") + e.what());
    }
    if (!warning.empty())
        std::cerr << R"({"warning":)" << nlohmann::json(warning).dump() << "}\n";
    return data;
}

LinearRestrictions build_restrictions(const std::vector<RestrictionRow>& rows,
                                      const std::vector<std::string>& column_names,
                                      bool intercept) {
    const int p = static_cast<int>(column_names.size());
    Matrix R(static_cast<int>(rows.size()), p, 0.0);
    Vector r(rows.size(), 0.0);

    for (size_t i = 0; i < rows.size(); ++i) {
        const RestrictionRow& row = rows[i];
        Vector coeffs(static_cast<size_t>(p), 0.0);
        if (!row.named.empty()) {
            for (const auto& [name, value] : row.named) {
                const auto it = std::find(column_names.begin(), column_names.end(), name);
                if (it == column_names.end())
                    throw IngestionError("restrictions: unknown column '" + name + "'");
                coeffs[static_cast<size_t>(it - column_names.begin())] = value;
            }
        } else if (!row.dense.empty()) {
            if (static_cast<int>(row.dense.size()) == p) {
                std::copy(row.dense.begin(), row.dense.end(), coeffs.begin());
            } else if (intercept && static_cast<int>(row.dense.size()) == p - 1) {
                // covariates only: the intercept stays unrestricted
                std::copy(row.dense.begin(), row.dense.end(), coeffs.begin() + 1);
            } else {
                throw IngestionError("restrictions: row " + std::to_string(i) + " has " +
                                     std::to_string(row.dense.size()) +
                                     " coefficients; expected " + std::to_string(p) +
                                     (intercept ? " or " + std::to_string(p - 1) : ""));
            }
        } else {
            throw IngestionError("restrictions: row " + std::to_string(i) +
                                 " carries no coefficients");
        }
        const double sign = (row.sense == "ge") ? -1.0 : 1.0;
        for (int j = 0; j < p; ++j) R(static_cast<int>(i), j) = sign * coeffs[static_cast<size_t>(j)];
        r[i] = sign * row.bound;
    }
    return LinearRestrictions(std::move(R), std::move(r));
}

namespace {

// --- shared command plumbing ---------------------------------------------

json config_echo(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["data"] = c.data_path;
    j["response"] = c.response;
    j["covariates"] = c.covariates;
    j["intercept"] = c.intercept;
    if (c.zeta) j["zeta"] = *c.zeta;
    j["estimators"] = c.estimators;
    j["mle_mode"] = c.mle_mode;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["bootstrap_reps"] = c.bootstrap_reps;
    j["format"] = c.format;
    j["output"] = c.output_path;
    j["mcmc"] = {{"n_iter", c.mcmc.n_iter},
                 {"burn_in", c.mcmc.burn_in},
                 {"proposal_mode", c.mcmc.proposal_mode},
                 {"proposal_scale", c.mcmc.proposal_scale}};
    json rows = json::array();
    for (const RestrictionRow& row : c.restrictions) {
        json jr;
        if (!row.named.empty())
            jr["coeffs"] = row.named;
        else
            jr["coeffs"] = row.dense;
        jr["bound"] = row.bound;
        jr["sense"] = row.sense;
        rows.push_back(std::move(jr));
    }
    j["restrictions"] = std::move(rows);
    j["grid"] = {{"zetas", c.sim_zetas},
                 {"ns", c.sim_ns},
                 {"rhos", c.sim_rhos},
                 {"beta_true", c.sim_beta_true},
                 {"replications", c.sim_replications},
                 {"restriction_bound", c.sim_restriction_bound}};
    return j;
}

void write_manifest(const RunConfig& config, const std::string& primary_output,
                    const std::vector<std::string>& outputs, json run_info) {
    json m;
    m["version"] = kVersion;
    m["command"] = config.command;
    m["seed"] = config.seed;
    m["config"] = config_echo(config);
    m["outputs"] = outputs;
    m["run"] = std::move(run_info);
    write_file(primary_output + ".manifest.json", m.dump(2) + "\n");
}

double pearson_dispersion(const Dataset& data, const FitResult& fit) {
    double s = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        const double r = (data.y[i] - fit.mu_hat[i]) / fit.mu_hat[i];
        s += r * r;
    }
    return s / (data.n() - data.p());
}

struct LoadedFit {
    Dataset data;
    FitResult mle;
    std::string zeta_source; // "config" or "estimated"
};

LoadedFit load_and_fit(const RunConfig& config) {
    LoadedFit lf;
    lf.data = load_csv(config.data_path, config.response, config.covariates, config.intercept);
    lf.data.zeta = config.zeta.value_or(1.0);
    lf.zeta_source = config.zeta ? "config" : "estimated";

    FitOptions opts;
    opts.mode = mle_mode_from_string(config.mle_mode);
    lf.mle = fit_mle(lf.data, opts);
    if (!lf.mle.converged)
        throw ContractError("MLE did not converge within " + std::to_string(opts.max_iter) +
                            " iterations");
    if (!config.zeta) {
        lf.data.zeta = pearson_dispersion(lf.data, lf.mle);
        lf.mle = fit_mle(lf.data, opts); // same coefficients, zeta-correct SEs
    }
    return lf;
}

std::vector<std::string> effective_estimators(const RunConfig& config) {
    if (!config.estimators.empty()) return config.estimators;
    if (config.command == "fit") {
        std::vector<std::string> est{"MLE", "GRE1", "GRE2", "BEUGRC"};
        if (!config.restrictions.empty()) est.push_back("BEGRC");
        return est;
    }
    return {"MLE", "GRE1", "GRE2", "BEUGRC", "BEGRC"};
}

struct FitRow {
    std::string estimator;
    Vector estimate;
    Vector se;
    json info; // iterations / acceptance rate / penalty
};

} // namespace

int cmd_fit(const RunConfig& config) {
    LoadedFit lf = load_and_fit(config);
    Dataset& data = lf.data;
    const FitResult& mle = lf.mle;
    const std::vector<std::string> estimators = effective_estimators(config);

    std::optional<CanonicalForm> cf;
    std::optional<LinearRestrictions> restrictions;
    if (!config.restrictions.empty())
        restrictions = build_restrictions(config.restrictions, data.column_names,
                                          config.intercept);
    std::optional<Matrix> proposal_cov;
    const auto proposal = [&]() -> const Matrix& {
        if (!proposal_cov) {
            Matrix cov = default_proposal_cov(data, mle.mu_hat);
            for (double& v : cov.data) v *= config.mcmc.proposal_scale;
            proposal_cov = std::move(cov);
        }
        return *proposal_cov;
    };
    McmcConfig mcmc;
    mcmc.n_iter = config.mcmc.n_iter;
    mcmc.burn_in = config.mcmc.burn_in;
    mcmc.proposal_mode = proposal_mode_from_string(config.mcmc.proposal_mode);

    std::vector<FitRow> table;
    json acceptance = json::object();
    for (const std::string& name : estimators) {
        FitRow row;
        row.estimator = name;
        const EstimatorKind kind = estimator_from_string(name);
        switch (kind) {
            case EstimatorKind::MLE:
                row.estimate = mle.beta_hat;
                row.se = mle.std_errors;
                row.info = {{"iterations", mle.iterations},
                            {"mode", config.mle_mode}};
                break;
            case EstimatorKind::GRE1:
            case EstimatorKind::GRE2: {
                if (!cf) cf = canonical_form(data, mle);
                const double k = (kind == EstimatorKind::GRE1)
                                     ? ridge_k1(*cf, data.zeta)
                                     : ridge_k2(*cf, data.zeta, data.n(), data.p());
                const FitResult ridge = fit_ridge(data, mle, k, name);
                row.estimate = ridge.beta_hat;
                row.se = ridge.std_errors;
                row.info = {{"penalty", k}};
                break;
            }
            case EstimatorKind::BEUGRC: {
                auto [mu_b, sigma_b] = default_hyperparameters(data.X);
                const PriorSpec prior = make_prior(std::move(mu_b), std::move(sigma_b));
                McmcConfig cfg = mcmc;
                cfg.proposal_cov = proposal();
                RngStream rng(config.seed, stream_index({12}));
                const Chain chain = run_beugrc(data, prior, cfg, rng);
                const PosteriorSummary s = summarize(chain);
                row.estimate = s.mean;
                row.se = s.sd;
                row.info = {{"acceptance_rate", chain.acceptance_rate},
                            {"n_iter", cfg.n_iter},
                            {"burn_in", cfg.burn_in}};
                acceptance["BEUGRC"] = chain.acceptance_rate;
                break;
            }
            case EstimatorKind::BEGRC: {
                if (!restrictions)
                    throw ContractError("BEGRC requested but no restrictions configured");
                auto [mu_b, sigma_b] = default_hyperparameters(data.X);
                const PriorSpec prior =
                    make_prior(std::move(mu_b), std::move(sigma_b), *restrictions);
                McmcConfig cfg = mcmc;
                cfg.proposal_cov = proposal();
                RngStream rng(config.seed, stream_index({11}));
                const Chain chain = run_begrc(data, prior, cfg, rng);
                const PosteriorSummary s = summarize(chain);
                row.estimate = s.mean;
                row.se = s.sd;
                row.info = {{"acceptance_rate", chain.acceptance_rate},
                            {"n_iter", cfg.n_iter},
                            {"burn_in", cfg.burn_in},
                            {"proposal_mode", config.mcmc.proposal_mode}};
                acceptance["BEGRC"] = chain.acceptance_rate;
                break;
            }
        }
        table.push_back(std::move(row));
    }

    const std::string out_path =
        config.output_path.empty()
            ? (config.format == "json" ? "fit_results.json" : "fit_results.csv")
            : config.output_path;

    if (config.format == "json") {
        json out;
        out["zeta"] = {{"value", data.zeta}, {"source", lf.zeta_source}};
        json rows = json::array();
        for (const FitRow& row : table) {
            json jr;
            jr["estimator"] = row.estimator;
            jr["info"] = row.info;
            json coefs = json::array();
            for (int j = 0; j < data.p(); ++j)
                coefs.push_back({{"name", data.column_names[static_cast<size_t>(j)]},
                                 {"estimate", row.estimate[static_cast<size_t>(j)]},
                                 {"se", row.se[static_cast<size_t>(j)]}});
            jr["coefficients"] = std::move(coefs);
            rows.push_back(std::move(jr));
        }
        out["estimates"] = std::move(rows);
        write_file(out_path, out.dump(2) + "\n");
    } else {
        std::string out = "estimator,coef,estimate,se\n";
        for (const FitRow& row : table)
            for (int j = 0; j < data.p(); ++j)
                out += row.estimator + "," + data.column_names[static_cast<size_t>(j)] + "," +
                       fmt_g(row.estimate[static_cast<size_t>(j)]) + "," +
                       fmt_g(row.se[static_cast<size_t>(j)]) + "\n";
        write_file(out_path, out);
    }

    json run_info;
    run_info["mle_mode"] = config.mle_mode;
    run_info["mle_iterations"] = mle.iterations;
    run_info["zeta"] = {{"value", data.zeta}, {"source", lf.zeta_source}};
    run_info["acceptance_rates"] = std::move(acceptance);
    write_manifest(config, out_path, {out_path}, std::move(run_info));
    return 0;
}

int cmd_simulate(const RunConfig& config) {
    ScenarioGrid grid;
    grid.zetas = config.sim_zetas;
    grid.ns = config.sim_ns;
    grid.rhos = config.sim_rhos;
    grid.beta_true = config.sim_beta_true;
    grid.replications = config.sim_replications;
    grid.base_seed = config.seed;
    grid.restriction_bound = config.sim_restriction_bound;
    grid.mcmc_iters = config.mcmc.n_iter;
    grid.mcmc_burn_in = config.mcmc.burn_in;
    grid.proposal_mode = proposal_mode_from_string(config.mcmc.proposal_mode);
    grid.proposal_scale = config.mcmc.proposal_scale;
    grid.mle_mode = mle_mode_from_string(config.mle_mode);
    grid.estimators.clear();
    for (const std::string& name : effective_estimators(config))
        grid.estimators.push_back(estimator_from_string(name));

    const ScenarioReport report = run_grid(grid, config.threads);
    const int p = static_cast<int>(grid.beta_true.size());

    const std::string out_path =
        config.output_path.empty() ? "simulation_mse.csv" : config.output_path;
    const std::string sd_bias_path = derived_path(out_path, "_sd_bias");

    write_file(out_path, report_to_csv(report, p));
    write_file(sd_bias_path, report_to_sd_bias_csv(report, p));
    std::vector<std::string> outputs{out_path, sd_bias_path};

    if (config.format == "json") {
        const std::string json_path = derived_path(out_path, "_report");
        const std::string json_path2 =
            json_path.size() > 4 && json_path.substr(json_path.size() - 4) == ".csv"
                ? json_path.substr(0, json_path.size() - 4) + ".json"
                : json_path + ".json";
        write_file(json_path2, report_to_json(report, p));
        outputs.push_back(json_path2);
    }

    int total_failures = 0;
    bool any_cell_dead = false;
    for (const CellStats& c : report.cells) {
        total_failures = std::max(total_failures, c.failures);
        if (c.failures >= grid.replications) any_cell_dead = true;
    }

    json run_info;
    run_info["cells"] = report.cells.size();
    run_info["max_cell_failures"] = total_failures;
    write_manifest(config, out_path, outputs, std::move(run_info));

    if (any_cell_dead) {
        std::cerr << R"({"error":{"type":"ConvergenceError","message":)"
                  << json("a grid cell lost every replication").dump() << "}}\n";
        return 3;
    }
    return 0;
}

int cmd_diagnose(const RunConfig& config) {
    LoadedFit lf = load_and_fit(config);
    const Dataset& data = lf.data;

    RngStream rng(config.seed, stream_index({13}));
    const GofReport gof = gamma_gof(rng, data.y, config.bootstrap_reps, config.threads);
    const ConditionReport cond = multicollinearity_condition_number(data, lf.mle);

    // Correlations among the covariates; the intercept column carries none.
    const int skip = (config.intercept ? 1 : 0);
    const int pc = data.p() - skip;
    if (pc < 1) throw ContractError("diagnose: no covariate columns");
    Matrix covariates_only(data.n(), pc);
    for (int i = 0; i < data.n(); ++i)
        for (int j = 0; j < pc; ++j) covariates_only(i, j) = data.X(i, j + skip);
    Matrix corr;
    try {
        corr = correlation_matrix(covariates_only);
    } catch (const DegeneracyError& e) {
        // Re-map the column index to its name for the caller.
        throw DegeneracyError(std::string(e.what()) + " (column order: " +
                              [&] {
                                  std::string names;
                                  for (int j = 0; j < pc; ++j) {
                                      if (j) names += ",";
                                      names += data.column_names[static_cast<size_t>(j + skip)];
                                  }
                                  return names;
                              }() +
                              ")");
    }

    const std::string out_path =
        config.output_path.empty()
            ? (config.format == "json" ? "diagnostics.json" : "diagnostics.csv")
            : config.output_path;
    const std::string corr_path = derived_path(out_path, "_correlation");
    const std::string corr_csv_path =
        corr_path.size() > 5 && corr_path.substr(corr_path.size() - 5) == ".json"
            ? corr_path.substr(0, corr_path.size() - 5) + ".csv"
            : corr_path;

    if (config.format == "json") {
        json out;
        out["ad_statistic"] = gof.ad_statistic;
        out["p_value"] = gof.p_value;
        out["fitted_shape"] = gof.fitted_shape;
        out["fitted_scale"] = gof.fitted_scale;
        out["cdf_clamped"] = gof.cdf_clamped;
        out["condition_number_weighted"] = cond.weighted;
        out["condition_number_unweighted"] = cond.unweighted;
        out["zeta"] = {{"value", data.zeta}, {"source", lf.zeta_source}};
        write_file(out_path, out.dump(2) + "\n");
    } else {
        std::string out = "metric,value\n";
        out += "ad_statistic," + fmt_g(gof.ad_statistic) + "\n";
        out += "p_value," + fmt_g(gof.p_value) + "\n";
        out += "fitted_shape," + fmt_g(gof.fitted_shape) + "\n";
        out += "fitted_scale," + fmt_g(gof.fitted_scale) + "\n";
        out += std::string("cdf_clamped,") + (gof.cdf_clamped ? "1" : "0") + "\n";
        out += "condition_number_weighted," + fmt_g(cond.weighted) + "\n";
        out += "condition_number_unweighted," + fmt_g(cond.unweighted) + "\n";
        out += "zeta," + fmt_g(data.zeta) + "\n";
        write_file(out_path, out);
    }

    std::string corr_csv;
    for (int j = 0; j < pc; ++j) {
        if (j) corr_csv += ",";
        corr_csv += data.column_names[static_cast<size_t>(j + skip)];
    }
    corr_csv += "\n";
    for (int i = 0; i < pc; ++i) {
        for (int j = 0; j < pc; ++j) {
            if (j) corr_csv += ",";
            corr_csv += fmt_g(corr(i, j));
        }
        corr_csv += "\n";
    }
    write_file(corr_csv_path, corr_csv);

    json run_info;
    run_info["mle_mode"] = config.mle_mode;
    run_info["zeta"] = {{"value", data.zeta}, {"source", lf.zeta_source}};
    run_info["bootstrap_reps"] = config.bootstrap_reps;
    write_manifest(config, out_path, {out_path, corr_csv_path}, std::move(run_info));
    return 0;
}

int run(const RunConfig& config) {
    const auto emit = [](const char* type, const std::string& message) {
        std::cerr << R"({"error":{"type":")" << type << R"(","message":)"
                  << json(message).dump() << "}}\n";
    };
    try {
        if (config.command == "fit") return cmd_fit(config);
        if (config.command == "simulate") return cmd_simulate(config);
        if (config.command == "diagnose") return cmd_diagnose(config);
        throw IngestionError("unknown command: '" + config.command +
                             "' (expected fit, simulate or diagnose)");
    } catch (const IngestionError& e) {
        emit("IngestionError", e.what());
        return 2;
    } catch (const FeasibilityError& e) {
        emit("FeasibilityError", e.what());
        return 3;
    } catch (const SingularityError& e) {
        emit("SingularityError", e.what());
        return 3;
    } catch (const Error& e) {
        emit("Error", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit("InternalError", e.what());
        return 3;
    }
}

} // namespace gammareg::cli
