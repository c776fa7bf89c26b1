#ifndef GAMMAREG_BAYES_HPP
#define GAMMAREG_BAYES_HPP

#include <optional>
#include <string>
#include <utility>

#include "gammareg/estimators.hpp"
#include "gammareg/tmvn.hpp"

namespace gammareg {

// Normal prior on beta; truncated to {R beta <= r} when restrictions are set.
struct PriorSpec {
    Vector mean;
    Matrix covariance;
    std::optional<LinearRestrictions> restrictions;
    Matrix precision; // cached inverse of covariance
};

PriorSpec make_prior(Vector mean, Matrix covariance,
                     std::optional<LinearRestrictions> restrictions = std::nullopt);

// Proposal kinds.  PaperFaithfulTn draws a truncated-normal random-walk
// block (one Gibbs cycle of TN_p(beta, Sigma_pro, R, r)) and applies the
// plain ratio as if the proposal were symmetric.  ExactIndicatorRw proposes from the untruncated normal walk and
// lets the -inf kernel reject infeasible points: symmetric and exactly
// invariant.
enum class ProposalMode { PaperFaithfulTn, ExactIndicatorRw };

std::string to_string(ProposalMode mode);
ProposalMode proposal_mode_from_string(const std::string& s);

struct McmcConfig {
    int n_iter = 15000;
    int burn_in = 2000;
    Matrix proposal_cov;
    ProposalMode proposal_mode = ProposalMode::PaperFaithfulTn;
    uint64_t seed = 0;
};

struct Chain {
    Matrix draws; // n_iter x p
    double acceptance_rate = 0.0;
    int burn_in = 0;
    std::string estimator_tag; // BEGRC or BEUGRC
};

// mu_beta = 0, Sigma_beta = (X^T X)^{-1}.
std::pair<Vector, Matrix> default_hyperparameters(const Matrix& X);

// Sigma_pro = (1/zeta) (X^T diag(mu_hat^2) X)^{-1}.
Matrix default_proposal_cov(const Dataset& data, const Vector& mu_hat);

// -(1/zeta) sum [ y e^{-eta} + eta ] - (1/2)(beta-mu)^T Sigma^{-1} (beta-mu),
// or -inf when restrictions are present and violated.
double log_posterior_kernel(const Dataset& data, const Vector& beta, const PriorSpec& prior);

// Restricted sampler (prior must carry restrictions); starts from a feasible
// projection of the MLE.
Chain run_begrc(const Dataset& data, const PriorSpec& prior, const McmcConfig& cfg,
                RngStream& rng);

// Unrestricted sampler; plain normal random-walk MH started at the MLE.
Chain run_beugrc(const Dataset& data, const PriorSpec& prior, const McmcConfig& cfg,
                 RngStream& rng);

struct PosteriorSummary {
    Vector mean;
    Vector sd;
};

// Coordinatewise mean/sd over post-burn-in draws; needs at least 100 of them.
PosteriorSummary summarize(const Chain& chain);

} // namespace gammareg

#endif
