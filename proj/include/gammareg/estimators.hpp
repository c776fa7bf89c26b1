#ifndef GAMMAREG_ESTIMATORS_HPP
#define GAMMAREG_ESTIMATORS_HPP

#include <string>

#include "gammareg/model.hpp"

namespace gammareg {

// Two fixed points ship side by side.  PaperFaithful solves the
// re-weighted least-squares normal equations (weights diag(mu^2), working response
// eta + (y - mu)/mu^2), i.e. X^T (y - mu) = 0.  LikelihoodConsistent
// drives the analytic score to zero (the true MLE of the stated likelihood),
// converging to X^T ((y - mu)/mu) = 0.
enum class MleMode { PaperFaithful, LikelihoodConsistent };

std::string to_string(MleMode mode);
MleMode mle_mode_from_string(const std::string& s);

struct FitOptions {
    int max_iter = 100;
    double tol = 1e-8;
    MleMode mode = MleMode::PaperFaithful;
};

struct FitResult {
    Vector beta_hat;
    Vector std_errors;
    Vector mu_hat;
    int iterations = 0;
    bool converged = false;
    std::string estimator_tag; // MLE, GRE1, GRE2, custom-ridge, ...
};

FitResult fit_mle(const Dataset& data, const FitOptions& opts = {});

// sqrt of diag of zeta * (X^T diag(mu^2) X)^{-1}.
Vector mle_std_errors(const Dataset& data, const FitResult& fit);

// Eigensystem of X^T diag(mu_hat^2) X plus the rotated coefficient vector.
struct CanonicalForm {
    Vector eigenvalues;  // ascending
    Matrix eigenvectors; // Lambda, column j pairs with eigenvalues[j]
    Vector alpha;        // Lambda^T beta_hat (or Lambda beta_hat, see below)
};

// conventional_alpha = true gives alpha = Lambda^T beta_hat (the standard
// canonical-form convention); false gives the literal Lambda beta_hat for
// compatibility with sources that print the rotation without the transpose.
CanonicalForm canonical_form(const Dataset& data, const FitResult& fit,
                             bool conventional_alpha = true);

// k1 = lambda_min * zeta / alpha_min^2
double ridge_k1(const CanonicalForm& cf, double zeta);

// k2 = max_j lambda_max / ((n - p) * zeta + lambda_j * alpha_j^2)
double ridge_k2(const CanonicalForm& cf, double zeta, int n, int p);

// beta_GRE = (X^T W X + diag(k))^{-1} X^T W X beta_MLE with W from mle_fit.
FitResult fit_ridge(const Dataset& data, const FitResult& mle_fit, double k,
                    const std::string& tag = "custom-ridge");
FitResult fit_ridge(const Dataset& data, const FitResult& mle_fit, const Vector& k,
                    const std::string& tag = "custom-ridge");

} // namespace gammareg

#endif
