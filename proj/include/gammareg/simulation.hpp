#ifndef GAMMAREG_SIMULATION_HPP
#define GAMMAREG_SIMULATION_HPP

#include <string>
#include <vector>

#include "gammareg/bayes.hpp"

namespace gammareg {

enum class EstimatorKind { MLE, GRE1, GRE2, BEUGRC, BEGRC };

std::string to_string(EstimatorKind e);
EstimatorKind estimator_from_string(const std::string& s);

// Monte Carlo study over the (zeta, n, rho) grid.  Defaults: beta_true = (1,1,1,1), 100 replications, restriction
// beta_j >= 0.8, chains of 15000 with 2000 burn-in.
struct ScenarioGrid {
    std::vector<double> zetas{0.25, 0.5};
    std::vector<int> ns{25, 50, 100, 200};
    std::vector<double> rhos{0.8, 0.9, 0.95, 0.99};
    Vector beta_true{1.0, 1.0, 1.0, 1.0};
    int replications = 100;
    uint64_t base_seed = 20240501;
    std::vector<EstimatorKind> estimators{EstimatorKind::MLE, EstimatorKind::GRE1,
                                          EstimatorKind::GRE2, EstimatorKind::BEUGRC,
                                          EstimatorKind::BEGRC};
    double restriction_bound = 0.8;
    int mcmc_iters = 15000;
    int mcmc_burn_in = 2000;
    ProposalMode proposal_mode = ProposalMode::PaperFaithfulTn;
    double proposal_scale = 1.0;
    MleMode mle_mode = MleMode::PaperFaithful;

    void validate() const;
};

struct CellStats {
    double zeta = 0.0;
    int n = 0;
    double rho = 0.0;
    EstimatorKind estimator = EstimatorKind::MLE;
    double mse = 0.0;
    Vector bias; // per coefficient
    Vector sd;   // per coefficient, divisor reps-1
    int failures = 0;
};

struct ScenarioReport {
    std::vector<CellStats> cells;

    const CellStats* find(double zeta, int n, double rho, EstimatorKind est) const;
};

// MSE / bias / sd over recorded estimates:
// mse = (1/(K p)) sum_k ||b_k - beta_true||^2 (per-coefficient average), bias_j = mean_k(b_kj) -
// beta_true_j, sd with divisor K-1.
struct AggregateStats {
    double mse = 0.0;
    Vector bias;
    Vector sd;
};

AggregateStats aggregate_estimates(const std::vector<Vector>& estimates,
                                   const Vector& beta_true);

// x_ij = sqrt(1 - rho^2) w_ij + rho w_{i,p+1}, w standard normal.
Matrix gen_design(RngStream& rng, int n, int p, double rho);

// y_i ~ Gamma(shape 1/zeta, scale mu_i zeta) with mu = exp(X beta).
Vector gen_response(RngStream& rng, const Matrix& X, const Vector& beta, double zeta);

// One grid cell at the given indices (indices feed the substream ids so that
// any execution order reproduces the same draws).
std::vector<CellStats> run_scenario(const ScenarioGrid& grid, int zeta_idx, int n_idx,
                                    int rho_idx);

// Whole grid.  threads = 0 picks the OpenMP default; 1 forces the serial
// path.  Output is byte-identical for every thread count.
ScenarioReport run_grid(const ScenarioGrid& grid, int threads = 0);

// Plain nested-loop reference used by the tests and the benchmark.
ScenarioReport run_grid_serial(const ScenarioGrid& grid);

// CSV with columns zeta,n,rho,estimator,mse,bias_1..p,sd_1..p,failures.
std::string report_to_csv(const ScenarioReport& report, int p);
// Long-form per-coefficient table: zeta,n,rho,coef,estimator,sd,bias.
std::string report_to_sd_bias_csv(const ScenarioReport& report, int p);
std::string report_to_json(const ScenarioReport& report, int p);

} // namespace gammareg

#endif
