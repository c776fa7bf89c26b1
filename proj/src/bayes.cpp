#include "gammareg/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gammareg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::string to_string(ProposalMode mode) {
    return mode == ProposalMode::PaperFaithfulTn ? "paper-faithful-tn" : "exact-indicator-rw";
}

ProposalMode proposal_mode_from_string(const std::string& s) {
    if (s == "paper-faithful-tn") return ProposalMode::PaperFaithfulTn;
    if (s == "exact-indicator-rw") return ProposalMode::ExactIndicatorRw;
    throw DomainError("unknown proposal mode: " + s);
}

PriorSpec make_prior(Vector mean, Matrix covariance,
                     std::optional<LinearRestrictions> restrictions) {
    const int p = static_cast<int>(mean.size());
    if (covariance.rows != p || covariance.cols != p)
        throw ContractError("prior: covariance dimensions do not match mean");
    if (restrictions && !restrictions->empty() && restrictions->p() != p)
        throw ContractError("prior: restriction columns do not match dimension");
    PriorSpec prior;
    prior.precision = inverse_spd(covariance);
    prior.mean = std::move(mean);
    prior.covariance = std::move(covariance);
    prior.restrictions = std::move(restrictions);
    return prior;
}

std::pair<Vector, Matrix> default_hyperparameters(const Matrix& X) {
    return {Vector(static_cast<size_t>(X.cols), 0.0), inverse_spd(gram(X))};
}

Matrix default_proposal_cov(const Dataset& data, const Vector& mu_hat) {
    Matrix cov = inverse_spd(weighted_crossproduct(data, mu_hat));
    for (double& v : cov.data) v /= data.zeta;
    return cov;
}

double log_posterior_kernel(const Dataset& data, const Vector& beta, const PriorSpec& prior) {
    if (prior.restrictions && !satisfies(*prior.restrictions, beta)) return kNegInf;

    double sum_core = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        double eta = 0.0;
        for (int j = 0; j < data.p(); ++j) eta += data.X(i, j) * beta[j];
        if (!(std::abs(eta) <= 700.0))
            throw NumericRangeError("log_posterior_kernel: exp overflow at row " +
                                        std::to_string(i),
                                    i);
        sum_core += data.y[i] * std::exp(-eta) + eta;
    }

    Vector centered(beta.size());
    for (size_t j = 0; j < beta.size(); ++j) centered[j] = beta[j] - prior.mean[j];
    double quad = 0.0;
    for (size_t j = 0; j < centered.size(); ++j)
        for (size_t k = 0; k < centered.size(); ++k)
            quad += centered[j] * prior.precision(static_cast<int>(j), static_cast<int>(k)) *
                    centered[k];

    return -sum_core / data.zeta - 0.5 * quad;
}

namespace {

// Shared Metropolis-Hastings driver.  The proposal is either a truncated
// Gibbs block (recentered every iteration, fixed precision) or the plain
// normal walk via the Cholesky factor of Sigma_pro.
Chain run_mh(const Dataset& data, const PriorSpec& prior, const McmcConfig& cfg,
             RngStream& rng, const Vector& init, bool truncated_walk,
             const std::string& tag) {
    if (cfg.burn_in >= cfg.n_iter)
        throw ContractError("mcmc: burn_in must be smaller than n_iter");
    const int p = static_cast<int>(init.size());

    TmvnSpec walk;
    Matrix walk_chol;
    if (truncated_walk) {
        walk.covariance = cfg.proposal_cov;
        walk.precision = inverse_spd(cfg.proposal_cov);
        walk.restrictions = prior.restrictions ? *prior.restrictions : LinearRestrictions();
    } else {
        walk_chol = cholesky(cfg.proposal_cov);
    }

    Chain chain;
    chain.estimator_tag = tag;
    chain.burn_in = cfg.burn_in;
    chain.draws = Matrix(cfg.n_iter, p);

    Vector state = init;
    double state_kernel = log_posterior_kernel(data, state, prior);
    long accepted = 0;

    for (int t = 0; t < cfg.n_iter; ++t) {
        Vector proposal(static_cast<size_t>(p));
        if (truncated_walk) {
            walk.mean = state; // random walk: recenter the block at the current state
            proposal = gibbs_sweep(rng, walk, state);
        } else {
            Vector z(static_cast<size_t>(p));
            for (int j = 0; j < p; ++j) z[j] = rng.normal();
            for (int j = 0; j < p; ++j) {
                double step = 0.0;
                for (int k = 0; k <= j; ++k) step += walk_chol(j, k) * z[k];
                proposal[j] = state[j] + step;
            }
        }

        double prop_kernel;
        try {
            prop_kernel = log_posterior_kernel(data, proposal, prior);
        } catch (const NumericRangeError&) {
            prop_kernel = kNegInf; // proposal wandered past exp range: reject
        }

        const double log_ratio = prop_kernel - state_kernel;
        if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
            state = proposal;
            state_kernel = prop_kernel;
            ++accepted;
        }
        for (int j = 0; j < p; ++j) chain.draws(t, j) = state[j];
    }
    chain.acceptance_rate = static_cast<double>(accepted) / cfg.n_iter;
    return chain;
}

Vector mle_start(const Dataset& data) {
    const FitResult fit = fit_mle(data);
    if (!fit.converged)
        throw ContractError("mcmc: MLE initializer did not converge");
    return fit.beta_hat;
}

// Restricted posterior mode by cyclic coordinate ascent.  The kernel is
// strictly concave, each coordinate move is a clamped 1-D Newton solve on
// the feasible interval.  Under strong collinearity the projected MLE can
// sit far from the posterior bulk while the proposal walk moves too slowly
// to recover within the chain budget; the mode does not.
Vector restricted_map(const Dataset& data, const PriorSpec& prior, Vector beta) {
    const LinearRestrictions& res = *prior.restrictions;
    const int p = data.p();
    const int max_passes = 500;

    Vector eta(static_cast<size_t>(data.n()));
    const auto recompute_eta = [&] {
        for (int i = 0; i < data.n(); ++i) {
            double e = 0.0;
            for (int j = 0; j < p; ++j) e += data.X(i, j) * beta[j];
            eta[i] = e;
        }
    };
    recompute_eta();

    for (int pass = 0; pass < max_passes; ++pass) {
        double moved = 0.0;
        for (int j = 0; j < p; ++j) {
            Interval iv{-std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
            if (!res.empty()) iv = coordinate_interval(res, j, beta);

            // 1-D Newton on d/dt kernel(beta + t e_j), clamped to [lo, hi].
            double t = 0.0;
            for (int it = 0; it < 50; ++it) {
                double g = 0.0, h = 0.0;
                for (int i = 0; i < data.n(); ++i) {
                    const double x = data.X(i, j);
                    if (x == 0.0) continue;
                    const double w =
                        data.y[i] * std::exp(-std::clamp(eta[i] + t * x, -700.0, 700.0));
                    g += (w - 1.0) * x;
                    h += w * x * x;
                }
                g /= data.zeta;
                h /= data.zeta;
                for (int k = 0; k < p; ++k) {
                    const double shifted =
                        beta[k] + (k == j ? t : 0.0) - prior.mean[k];
                    g -= prior.precision(j, k) * shifted;
                }
                h += prior.precision(j, j);
                const double lo = iv.lo - beta[j], hi = iv.hi - beta[j];
                double next = t + g / h;
                next = std::min(std::max(next, lo), hi);
                const double delta = std::abs(next - t);
                t = next;
                if (delta < 1e-12 * std::max(1.0, std::abs(beta[j]))) break;
            }
            if (t != 0.0) {
                moved = std::max(moved, std::abs(t));
                for (int i = 0; i < data.n(); ++i) eta[i] += data.X(i, j) * t;
                beta[j] += t;
            }
        }
        if (moved < 1e-10) break;
    }
    return beta;
}

} // namespace

Chain run_begrc(const Dataset& data, const PriorSpec& prior, const McmcConfig& cfg,
                RngStream& rng) {
    if (!prior.restrictions)
        throw ContractError("run_begrc: prior carries no restrictions");
    // With an empty system this is exactly the BEUGRC start, keeping the two
    // samplers draw-for-draw identical under exact-indicator-rw proposals.
    Vector start = mle_start(data);
    if (!prior.restrictions->empty())
        start = restricted_map(data, prior, feasible_start(*prior.restrictions, start));
    return run_mh(data, prior, cfg, rng, start,
                  cfg.proposal_mode == ProposalMode::PaperFaithfulTn, "BEGRC");
}

Chain run_beugrc(const Dataset& data, const PriorSpec& prior, const McmcConfig& cfg,
                 RngStream& rng) {
    if (prior.restrictions)
        throw ContractError("run_beugrc: prior must not carry restrictions");
    return run_mh(data, prior, cfg, rng, mle_start(data), false, "BEUGRC");
}

PosteriorSummary summarize(const Chain& chain) {
    const int kept = chain.draws.rows - chain.burn_in;
    if (kept < 100)
        throw ContractError("summarize: need at least 100 post-burn-in draws");
    const int p = chain.draws.cols;

    PosteriorSummary s;
    s.mean.assign(static_cast<size_t>(p), 0.0);
    s.sd.assign(static_cast<size_t>(p), 0.0);
    for (int t = chain.burn_in; t < chain.draws.rows; ++t)
        for (int j = 0; j < p; ++j) s.mean[j] += chain.draws(t, j);
    for (int j = 0; j < p; ++j) s.mean[j] /= kept;
    for (int t = chain.burn_in; t < chain.draws.rows; ++t)
        for (int j = 0; j < p; ++j) {
            const double d = chain.draws(t, j) - s.mean[j];
            s.sd[j] += d * d;
        }
    for (int j = 0; j < p; ++j) s.sd[j] = std::sqrt(s.sd[j] / (kept - 1));
    return s;
}

} // namespace gammareg
