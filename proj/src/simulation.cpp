#include "gammareg/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gammareg {

std::string to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::MLE: return "MLE";
        case EstimatorKind::GRE1: return "GRE1";
        case EstimatorKind::GRE2: return "GRE2";
        case EstimatorKind::BEUGRC: return "BEUGRC";
        case EstimatorKind::BEGRC: return "BEGRC";
    }
    return "?";
}

EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "MLE") return EstimatorKind::MLE;
    if (s == "GRE1") return EstimatorKind::GRE1;
    if (s == "GRE2") return EstimatorKind::GRE2;
    if (s == "BEUGRC") return EstimatorKind::BEUGRC;
    if (s == "BEGRC") return EstimatorKind::BEGRC;
    throw DomainError("unknown estimator: " + s);
}

void ScenarioGrid::validate() const {
    if (replications < 1) throw ContractError("grid: replications must be >= 1");
    if (zetas.empty() || ns.empty() || rhos.empty() || estimators.empty())
        throw ContractError("grid: zetas, ns, rhos and estimators must be nonempty");
    for (double z : zetas)
        if (!(z > 0.0)) throw DomainError("grid: zeta must be positive");
    for (double rho : rhos)
        if (rho < 0.0 || rho >= 1.0) throw DomainError("grid: rho must lie in [0, 1)");
    const int p = static_cast<int>(beta_true.size());
    if (p < 1) throw ContractError("grid: beta_true must be nonempty");
    for (int n : ns)
        if (n <= p) throw ContractError("grid: every n must exceed p");
    if (mcmc_burn_in >= mcmc_iters || mcmc_iters - mcmc_burn_in < 100)
        throw ContractError("grid: need at least 100 post-burn-in MCMC draws");
    if (!(proposal_scale > 0.0)) throw DomainError("grid: proposal_scale must be positive");
}

const CellStats* ScenarioReport::find(double zeta, int n, double rho,
                                      EstimatorKind est) const {
    for (const CellStats& c : cells)
        if (c.n == n && c.estimator == est && std::abs(c.zeta - zeta) < 1e-12 &&
            std::abs(c.rho - rho) < 1e-12)
            return &c;
    return nullptr;
}

Matrix gen_design(RngStream& rng, int n, int p, double rho) {
    if (rho < 0.0 || rho >= 1.0) throw DomainError("gen_design: rho must lie in [0, 1)");
    const double s = std::sqrt(1.0 - rho * rho);
    Matrix x(n, p);
    for (int i = 0; i < n; ++i) {
        double shared = 0.0;
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
        shared = rng.normal(); // w_{i, p+1}
        for (int j = 0; j < p; ++j) x(i, j) = s * x(i, j) + rho * shared;
    }
    return x;
}

Vector gen_response(RngStream& rng, const Matrix& X, const Vector& beta, double zeta) {
    const Vector mu = mean_response(X, beta);
    Vector y(mu.size());
    for (size_t i = 0; i < mu.size(); ++i) y[i] = rng.gamma(1.0 / zeta, mu[i] * zeta);
    return y;
}

namespace {

enum StreamPurpose : uint64_t { kDesign = 1, kResponse = 2, kBegrc = 3, kBeugrc = 4 };

struct RepResult {
    bool failed = false;
    std::vector<Vector> estimates; // parallel to grid.estimators
};

uint64_t substream(int zi, int ni, int ri, int rep, StreamPurpose purpose) {
    return stream_index({static_cast<uint64_t>(zi), static_cast<uint64_t>(ni),
                         static_cast<uint64_t>(ri), static_cast<uint64_t>(rep),
                         static_cast<uint64_t>(purpose)});
}

RepResult run_replication(const ScenarioGrid& grid, int zi, int ni, int ri, int rep) {
    const double zeta = grid.zetas[zi];
    const int n = grid.ns[ni];
    const double rho = grid.rhos[ri];
    const int p = static_cast<int>(grid.beta_true.size());

    RepResult out;
    out.estimates.resize(grid.estimators.size());
    try {
        RngStream design_rng(grid.base_seed, substream(zi, ni, ri, rep, kDesign));
        RngStream response_rng(grid.base_seed, substream(zi, ni, ri, rep, kResponse));

        Dataset data;
        data.X = gen_design(design_rng, n, p, rho);
        data.y = gen_response(response_rng, data.X, grid.beta_true, zeta);
        data.zeta = zeta;

        FitOptions fit_opts;
        fit_opts.mode = grid.mle_mode;
        const FitResult mle = fit_mle(data, fit_opts);
        if (!mle.converged) {
            out.failed = true;
            return out;
        }

        std::optional<CanonicalForm> cf;
        std::optional<Matrix> proposal_cov;
        auto proposal = [&]() -> const Matrix& {
            if (!proposal_cov) {
                Matrix cov = default_proposal_cov(data, mle.mu_hat);
                for (double& v : cov.data) v *= grid.proposal_scale;
                proposal_cov = std::move(cov);
            }
            return *proposal_cov;
        };

        for (size_t e = 0; e < grid.estimators.size(); ++e) {
            switch (grid.estimators[e]) {
                case EstimatorKind::MLE:
                    out.estimates[e] = mle.beta_hat;
                    break;
                case EstimatorKind::GRE1: {
                    if (!cf) cf = canonical_form(data, mle);
                    out.estimates[e] =
                        fit_ridge(data, mle, ridge_k1(*cf, zeta), "GRE1").beta_hat;
                    break;
                }
                case EstimatorKind::GRE2: {
                    if (!cf) cf = canonical_form(data, mle);
                    out.estimates[e] =
                        fit_ridge(data, mle, ridge_k2(*cf, zeta, n, p), "GRE2").beta_hat;
                    break;
                }
                case EstimatorKind::BEUGRC: {
                    auto [mu_b, sigma_b] = default_hyperparameters(data.X);
                    const PriorSpec prior = make_prior(std::move(mu_b), std::move(sigma_b));
                    McmcConfig cfg;
                    cfg.n_iter = grid.mcmc_iters;
                    cfg.burn_in = grid.mcmc_burn_in;
                    cfg.proposal_cov = proposal();
                    RngStream rng(grid.base_seed, substream(zi, ni, ri, rep, kBeugrc));
                    out.estimates[e] = summarize(run_beugrc(data, prior, cfg, rng)).mean;
                    break;
                }
                case EstimatorKind::BEGRC: {
                    auto [mu_b, sigma_b] = default_hyperparameters(data.X);
                    const PriorSpec prior =
                        make_prior(std::move(mu_b), std::move(sigma_b),
                                   LinearRestrictions::all_coords_at_least(
                                       p, grid.restriction_bound));
                    McmcConfig cfg;
                    cfg.n_iter = grid.mcmc_iters;
                    cfg.burn_in = grid.mcmc_burn_in;
                    cfg.proposal_cov = proposal();
                    cfg.proposal_mode = grid.proposal_mode;
                    RngStream rng(grid.base_seed, substream(zi, ni, ri, rep, kBegrc));
                    out.estimates[e] = summarize(run_begrc(data, prior, cfg, rng)).mean;
                    break;
                }
            }
        }
    } catch (const Error&) {
        out.failed = true;
    }
    return out;
}

std::vector<CellStats> aggregate_cell(const ScenarioGrid& grid, int zi, int ni, int ri,
                                      const std::vector<RepResult>& reps) {
    const int p = static_cast<int>(grid.beta_true.size());
    std::vector<CellStats> cells;
    int failures = 0;
    for (const RepResult& r : reps) failures += r.failed ? 1 : 0;

    for (size_t e = 0; e < grid.estimators.size(); ++e) {
        CellStats cell;
        cell.zeta = grid.zetas[zi];
        cell.n = grid.ns[ni];
        cell.rho = grid.rhos[ri];
        cell.estimator = grid.estimators[e];
        cell.failures = failures;

        std::vector<Vector> kept;
        kept.reserve(reps.size());
        for (const RepResult& r : reps)
            if (!r.failed) kept.push_back(r.estimates[e]);

        if (kept.empty()) {
            cell.mse = std::numeric_limits<double>::quiet_NaN();
            cell.bias.assign(static_cast<size_t>(p), 0.0);
            cell.sd.assign(static_cast<size_t>(p), 0.0);
        } else {
            AggregateStats stats = aggregate_estimates(kept, grid.beta_true);
            cell.mse = stats.mse;
            cell.bias = std::move(stats.bias);
            cell.sd = std::move(stats.sd);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

} // namespace

AggregateStats aggregate_estimates(const std::vector<Vector>& estimates,
                                   const Vector& beta_true) {
    if (estimates.empty()) throw ContractError("aggregate_estimates: no estimates");
    const int p = static_cast<int>(beta_true.size());
    const int k = static_cast<int>(estimates.size());

    AggregateStats stats;
    stats.bias.assign(static_cast<size_t>(p), 0.0);
    stats.sd.assign(static_cast<size_t>(p), 0.0);

    // Per-coefficient convention: squared error averaged over all K*p
    // coefficient estimates, not summed over coordinates.
    Vector mean(static_cast<size_t>(p), 0.0);
    double mse = 0.0;
    for (const Vector& est : estimates)
        for (int j = 0; j < p; ++j) {
            const double d = est[static_cast<size_t>(j)] - beta_true[static_cast<size_t>(j)];
            mse += d * d;
            mean[static_cast<size_t>(j)] += est[static_cast<size_t>(j)];
        }
    stats.mse = mse / (static_cast<double>(k) * p);
    for (int j = 0; j < p; ++j) mean[static_cast<size_t>(j)] /= k;
    for (int j = 0; j < p; ++j)
        stats.bias[static_cast<size_t>(j)] =
            mean[static_cast<size_t>(j)] - beta_true[static_cast<size_t>(j)];

    if (k > 1) {
        for (const Vector& est : estimates)
            for (int j = 0; j < p; ++j) {
                const double d = est[static_cast<size_t>(j)] - mean[static_cast<size_t>(j)];
                stats.sd[static_cast<size_t>(j)] += d * d;
            }
        for (int j = 0; j < p; ++j)
            stats.sd[static_cast<size_t>(j)] = std::sqrt(stats.sd[static_cast<size_t>(j)] / (k - 1));
    }
    return stats;
}

std::vector<CellStats> run_scenario(const ScenarioGrid& grid, int zeta_idx, int n_idx,
                                    int rho_idx) {
    grid.validate();
    std::vector<RepResult> reps(static_cast<size_t>(grid.replications));
    for (int rep = 0; rep < grid.replications; ++rep)
        reps[rep] = run_replication(grid, zeta_idx, n_idx, rho_idx, rep);
    return aggregate_cell(grid, zeta_idx, n_idx, rho_idx, reps);
}

ScenarioReport run_grid_serial(const ScenarioGrid& grid) {
    grid.validate();
    ScenarioReport report;
    for (size_t zi = 0; zi < grid.zetas.size(); ++zi)
        for (size_t ni = 0; ni < grid.ns.size(); ++ni)
            for (size_t ri = 0; ri < grid.rhos.size(); ++ri) {
                auto cells = run_scenario(grid, static_cast<int>(zi), static_cast<int>(ni),
                                          static_cast<int>(ri));
                for (auto& c : cells) report.cells.push_back(std::move(c));
            }
    return report;
}

ScenarioReport run_grid(const ScenarioGrid& grid, int threads) {
    grid.validate();
    struct Task {
        int zi, ni, ri, rep;
    };
    std::vector<Task> tasks;
    const int n_cells = static_cast<int>(grid.zetas.size() * grid.ns.size() * grid.rhos.size());
    tasks.reserve(static_cast<size_t>(n_cells) * grid.replications);
    for (size_t zi = 0; zi < grid.zetas.size(); ++zi)
        for (size_t ni = 0; ni < grid.ns.size(); ++ni)
            for (size_t ri = 0; ri < grid.rhos.size(); ++ri)
                for (int rep = 0; rep < grid.replications; ++rep)
                    tasks.push_back({static_cast<int>(zi), static_cast<int>(ni),
                                     static_cast<int>(ri), rep});

    std::vector<RepResult> results(tasks.size());
#ifdef _OPENMP
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(tasks.size()); ++i) {
        const Task& t = tasks[static_cast<size_t>(i)];
        results[static_cast<size_t>(i)] = run_replication(grid, t.zi, t.ni, t.ri, t.rep);
    }
#else
    (void)threads;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        results[i] = run_replication(grid, t.zi, t.ni, t.ri, t.rep);
    }
#endif

    // Serial aggregation in fixed cell order keeps the report bit-identical
    // for every thread count.
    ScenarioReport report;
    size_t offset = 0;
    for (size_t zi = 0; zi < grid.zetas.size(); ++zi)
        for (size_t ni = 0; ni < grid.ns.size(); ++ni)
            for (size_t ri = 0; ri < grid.rhos.size(); ++ri) {
                std::vector<RepResult> cell_reps(
                    results.begin() + static_cast<long>(offset),
                    results.begin() + static_cast<long>(offset + grid.replications));
                offset += static_cast<size_t>(grid.replications);
                auto cells = aggregate_cell(grid, static_cast<int>(zi), static_cast<int>(ni),
                                            static_cast<int>(ri), cell_reps);
                for (auto& c : cells) report.cells.push_back(std::move(c));
            }
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_stat(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::string report_to_csv(const ScenarioReport& report, int p) {
    std::string out = "zeta,n,rho,estimator,mse";
    for (int j = 1; j <= p; ++j) out += ",bias_" + std::to_string(j);
    for (int j = 1; j <= p; ++j) out += ",sd_" + std::to_string(j);
    out += ",failures\n";
    for (const CellStats& c : report.cells) {
        out += fmt(c.zeta) + "," + std::to_string(c.n) + "," + fmt(c.rho) + "," +
               to_string(c.estimator) + "," + fmt_stat(c.mse);
        for (int j = 0; j < p; ++j) out += "," + fmt_stat(c.bias[j]);
        for (int j = 0; j < p; ++j) out += "," + fmt_stat(c.sd[j]);
        out += "," + std::to_string(c.failures) + "\n";
    }
    return out;
}

std::string report_to_sd_bias_csv(const ScenarioReport& report, int p) {
    std::string out = "zeta,n,rho,coef,estimator,sd,bias\n";
    for (const CellStats& c : report.cells)
        for (int j = 0; j < p; ++j)
            out += fmt(c.zeta) + "," + std::to_string(c.n) + "," + fmt(c.rho) + ",beta_" +
                   std::to_string(j + 1) + "," + to_string(c.estimator) + "," +
                   fmt_stat(c.sd[j]) + "," + fmt_stat(c.bias[j]) + "\n";
    return out;
}

std::string report_to_json(const ScenarioReport& report, int p) {
    nlohmann::json cells = nlohmann::json::array();
    for (const CellStats& c : report.cells) {
        nlohmann::json cell;
        cell["zeta"] = c.zeta;
        cell["n"] = c.n;
        cell["rho"] = c.rho;
        cell["estimator"] = to_string(c.estimator);
        cell["mse"] = c.mse;
        cell["bias"] = c.bias;
        cell["sd"] = c.sd;
        cell["failures"] = c.failures;
        cells.push_back(std::move(cell));
    }
    nlohmann::json root;
    root["p"] = p;
    root["cells"] = std::move(cells);
    return root.dump(2) + "\n";
}

} // namespace gammareg
