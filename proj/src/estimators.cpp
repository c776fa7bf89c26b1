#include "gammareg/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gammareg {

std::string to_string(MleMode mode) {
    return mode == MleMode::PaperFaithful ? "paper-faithful" : "likelihood-consistent";
}

MleMode mle_mode_from_string(const std::string& s) {
    if (s == "paper-faithful") return MleMode::PaperFaithful;
    if (s == "likelihood-consistent") return MleMode::LikelihoodConsistent;
    throw DomainError("unknown MLE mode: " + s);
}

namespace {

// Least squares on log responses: exact for noiseless log-linear data.
Vector initial_beta(const Dataset& data) {
    Vector logy(data.y.size());
    for (size_t i = 0; i < data.y.size(); ++i) logy[i] = std::log(data.y[i]);
    const Matrix xtx = gram(data.X);
    Vector xty(static_cast<size_t>(data.p()), 0.0);
    for (int j = 0; j < data.p(); ++j)
        for (int i = 0; i < data.n(); ++i) xty[j] += data.X(i, j) * logy[i];
    return solve_spd(xtx, xty);
}

// The re-weighted least-squares update beta <- (X^T W X)^{-1} X^T W M with
// W = diag(mu^2), M_i = eta_i + (y_i - mu_i)/mu_i^2 is a fixed-point scheme
// for X^T (y - mu) = 0, but its linear rate approaches 1 once the fitted
// means spread out (measured up to 0.998), which cannot reach tol within
// max_iter.  X^T (y - mu) = 0 is the stationarity condition of the concave
// function sum_i [ y_i eta_i - exp(eta_i) ], so the same fixed point is
// reached here by damped Newton on that objective.
FitResult fit_paper_faithful(const Dataset& data, const FitOptions& opts) {
    FitResult fit;
    fit.estimator_tag = "MLE";
    Vector beta = initial_beta(data);

    const auto objective = [&](const Vector& b) {
        double f = 0.0;
        for (int i = 0; i < data.n(); ++i) {
            double eta = 0.0;
            for (int j = 0; j < data.p(); ++j) eta += data.X(i, j) * b[j];
            if (!(std::abs(eta) <= 700.0))
                throw NumericRangeError("fit_mle: linear predictor overflows exp at row " +
                                            std::to_string(i),
                                        i);
            f += data.y[i] * eta - std::exp(eta);
        }
        return f;
    };

    double obj = objective(beta);
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const Vector mu = mean_response(data.X, beta);
        Vector grad(static_cast<size_t>(data.p()), 0.0);
        for (int j = 0; j < data.p(); ++j)
            for (int i = 0; i < data.n(); ++i)
                grad[j] += data.X(i, j) * (data.y[i] - mu[i]);

        const Matrix hess = weighted_gram(data.X, mu); // X^T diag(mu) X
        const Vector step = solve_spd(hess, grad);

        double scale = 1.0;
        Vector next = beta;
        for (int halving = 0; halving < 40; ++halving) {
            for (int j = 0; j < data.p(); ++j) next[j] = beta[j] + scale * step[j];
            double cand;
            try {
                cand = objective(next);
            } catch (const NumericRangeError&) {
                scale *= 0.5;
                continue;
            }
            if (cand >= obj - 1e-12 * std::abs(obj)) {
                obj = cand;
                break;
            }
            scale *= 0.5;
        }

        double moved = 0.0;
        for (int j = 0; j < data.p(); ++j) moved = std::max(moved, std::abs(next[j] - beta[j]));
        beta = next;
        fit.iterations = iter;
        if (moved < opts.tol) {
            fit.converged = true;
            break;
        }
    }
    fit.beta_hat = beta;
    fit.mu_hat = mean_response(data.X, beta);
    return fit;
}

FitResult fit_likelihood_consistent(const Dataset& data, const FitOptions& opts) {
    FitResult fit;
    fit.estimator_tag = "MLE";
    Vector beta = initial_beta(data);
    double ll = log_likelihood(data, beta);

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const Vector g = score(data, beta);
        fit.iterations = iter;
        if (inf_norm(g) < opts.tol) {
            fit.converged = true;
            break;
        }
        // Newton on the observed information (1/zeta) X^T diag(y e^{-eta}) X,
        // positive definite since y > 0.
        Vector w(static_cast<size_t>(data.n()));
        for (int i = 0; i < data.n(); ++i) {
            double eta = 0.0;
            for (int j = 0; j < data.p(); ++j) eta += data.X(i, j) * beta[j];
            w[i] = data.y[i] * std::exp(-eta) / data.zeta;
        }
        const Matrix hess = weighted_gram(data.X, w);
        Vector step = solve_spd(hess, g);

        // Halve until the likelihood does not decrease (ascent guarantee).
        double scale = 1.0;
        for (int halving = 0; halving < 40; ++halving) {
            Vector cand = beta;
            for (int j = 0; j < data.p(); ++j) cand[j] += scale * step[j];
            double cand_ll;
            try {
                cand_ll = log_likelihood(data, cand);
            } catch (const NumericRangeError&) {
                scale *= 0.5;
                continue;
            }
            if (cand_ll >= ll - 1e-12 * std::abs(ll)) {
                beta = cand;
                ll = cand_ll;
                break;
            }
            scale *= 0.5;
        }
    }
    fit.beta_hat = beta;
    fit.mu_hat = mean_response(data.X, beta);
    return fit;
}

} // namespace

namespace {

// Lighter than validate_dataset: the fitter also serves saturated (n = p)
// problems, which the loader's n > p rule excludes.
void check_fit_inputs(const Dataset& data) {
    if (data.p() < 1 || data.n() < data.p())
        throw ContractError("fit_mle: need n >= p >= 1");
    if (static_cast<int>(data.y.size()) != data.n())
        throw ContractError("fit_mle: y length does not match X rows");
    if (!(data.zeta > 0.0) || !std::isfinite(data.zeta))
        throw DomainError("fit_mle: zeta must be positive and finite");
    for (int i = 0; i < data.n(); ++i)
        if (!(data.y[i] > 0.0) || !std::isfinite(data.y[i]))
            throw DomainError("fit_mle: response must be strictly positive (row " +
                              std::to_string(i) + ")");
}

} // namespace

FitResult fit_mle(const Dataset& data, const FitOptions& opts) {
    check_fit_inputs(data);
    FitResult fit = (opts.mode == MleMode::PaperFaithful)
                        ? fit_paper_faithful(data, opts)
                        : fit_likelihood_consistent(data, opts);
    if (fit.converged) fit.std_errors = mle_std_errors(data, fit);
    return fit;
}

Vector mle_std_errors(const Dataset& data, const FitResult& fit) {
    if (!fit.converged) throw ContractError("mle_std_errors: fit did not converge");
    const Matrix info_inv = inverse_spd(weighted_crossproduct(data, fit.mu_hat));
    Vector se(static_cast<size_t>(data.p()));
    for (int j = 0; j < data.p(); ++j) se[j] = std::sqrt(data.zeta * info_inv(j, j));
    return se;
}

CanonicalForm canonical_form(const Dataset& data, const FitResult& fit,
                             bool conventional_alpha) {
    if (!fit.converged) throw ContractError("canonical_form: fit did not converge");
    const Matrix xtwx = weighted_crossproduct(data, fit.mu_hat);
    const SymmetricEigen eig = sym_eigen(xtwx);
    if (!(eig.eigenvalues.front() > 0.0))
        throw SingularityError("canonical_form: weighted cross-product is not PD", 0);

    CanonicalForm cf;
    cf.eigenvalues = eig.eigenvalues;
    cf.eigenvectors = eig.eigenvectors;
    cf.alpha = conventional_alpha ? matvec(transpose(eig.eigenvectors), fit.beta_hat)
                                  : matvec(eig.eigenvectors, fit.beta_hat);
    return cf;
}

double ridge_k1(const CanonicalForm& cf, double zeta) {
    double alpha_min_sq = std::numeric_limits<double>::infinity();
    for (double a : cf.alpha) alpha_min_sq = std::min(alpha_min_sq, a * a);
    if (!(alpha_min_sq > 0.0))
        throw DegeneratePenaltyError("ridge_k1: some alpha_j is zero");
    return cf.eigenvalues.front() * zeta / alpha_min_sq;
}

double ridge_k2(const CanonicalForm& cf, double zeta, int n, int p) {
    const double lambda_max = cf.eigenvalues.back();
    double k = 0.0;
    for (size_t j = 0; j < cf.alpha.size(); ++j) {
        const double denom =
            (static_cast<double>(n) - static_cast<double>(p)) * zeta +
            cf.eigenvalues[j] * cf.alpha[j] * cf.alpha[j];
        if (!(denom > 0.0))
            throw DegeneratePenaltyError("ridge_k2: non-positive denominator at index " +
                                         std::to_string(j));
        k = std::max(k, lambda_max / denom);
    }
    return k;
}

FitResult fit_ridge(const Dataset& data, const FitResult& mle_fit, const Vector& k,
                    const std::string& tag) {
    if (!mle_fit.converged) throw ContractError("fit_ridge: MLE fit did not converge");
    if (static_cast<int>(k.size()) != data.p())
        throw ContractError("fit_ridge: penalty vector length does not match p");
    for (double kj : k)
        if (kj < 0.0 || !std::isfinite(kj))
            throw DomainError("fit_ridge: penalties must be nonnegative and finite");

    const Matrix xtwx = weighted_crossproduct(data, mle_fit.mu_hat);
    Matrix penalized = xtwx;
    for (int j = 0; j < data.p(); ++j) penalized(j, j) += k[j];

    const Vector rhs = matvec(xtwx, mle_fit.beta_hat);
    FitResult fit;
    fit.estimator_tag = tag;
    fit.beta_hat = solve_spd(penalized, rhs);
    fit.mu_hat = mean_response(data.X, fit.beta_hat);
    fit.iterations = mle_fit.iterations;
    fit.converged = true;

    // Sandwich SEs: zeta * diag(A_k^{-1} X^T W X A_k^{-1}).
    const Matrix ak_inv = inverse_spd(penalized);
    const Matrix sandwich = matmul(ak_inv, matmul(xtwx, ak_inv));
    fit.std_errors.resize(static_cast<size_t>(data.p()));
    for (int j = 0; j < data.p(); ++j)
        fit.std_errors[j] = std::sqrt(data.zeta * sandwich(j, j));
    return fit;
}

FitResult fit_ridge(const Dataset& data, const FitResult& mle_fit, double k,
                    const std::string& tag) {
    return fit_ridge(data, mle_fit, Vector(static_cast<size_t>(data.p()), k), tag);
}

} // namespace gammareg
