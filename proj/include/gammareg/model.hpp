#ifndef GAMMAREG_MODEL_HPP
#define GAMMAREG_MODEL_HPP

#include <string>
#include <vector>

#include "gammareg/numerics.hpp"

namespace gammareg {

// Gamma regression data in the (zeta, mu) parametrization with log link:
// y_i ~ Gamma(shape 1/zeta, scale mu_i * zeta), log(mu_i) = X_i^T beta,
// so E y_i = mu_i and Var y_i = zeta * mu_i^2.
struct Dataset {
    Matrix X;              // n x p design; may carry an all-ones intercept column
    Vector y;              // strictly positive responses
    double zeta = 1.0;     // precision parameter, a priori known
    std::vector<std::string> column_names; // optional, parallel to X columns

    int n() const { return X.rows; }
    int p() const { return X.cols; }
};

// Checks n > p >= 1, y > 0, zeta > 0.  The column-rank check is warn-only
// (multicollinearity is expected input, not an error); a human-readable
// warning is appended to *warning when the Gram matrix fails to factor.
void validate_dataset(const Dataset& data, std::string* warning = nullptr);

// mu_i = exp(X_i^T beta); NumericRangeError names the first row where
// |X_i^T beta| exceeds 700.
Vector mean_response(const Matrix& X, const Vector& beta);

// Log of the reparametrized gamma density f(y | zeta, mu).
double gamma_log_density(double y, double zeta, double mu);

double log_likelihood(const Dataset& data, const Vector& beta);

// Gradient of log_likelihood: (1/zeta) sum_i (y_i e^{-X_i beta} - 1) X_i.
Vector score(const Dataset& data, const Vector& beta);

// X^T diag(mu^2) X.
Matrix weighted_crossproduct(const Dataset& data, const Vector& mu);

} // namespace gammareg

#endif
