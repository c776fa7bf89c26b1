#include "gammareg/model.hpp"

#include <cmath>
#include <string>

namespace gammareg {

void validate_dataset(const Dataset& data, std::string* warning) {
    if (data.p() < 1 || data.n() <= data.p())
        throw ContractError("dataset: need n > p >= 1 (got n=" + std::to_string(data.n()) +
                            ", p=" + std::to_string(data.p()) + ")");
    if (static_cast<int>(data.y.size()) != data.n())
        throw ContractError("dataset: y length does not match X rows");
    if (!(data.zeta > 0.0) || !std::isfinite(data.zeta))
        throw DomainError("dataset: zeta must be positive and finite");
    for (int i = 0; i < data.n(); ++i)
        if (!(data.y[i] > 0.0) || !std::isfinite(data.y[i]))
            throw DomainError("dataset: response must be strictly positive (row " +
                              std::to_string(i) + ")");
    // Rank check: warn-only, multicollinearity is the expected regime here.
    try {
        cholesky(gram(data.X));
    } catch (const SingularityError& e) {
        if (warning)
            *warning += "design matrix is numerically rank-deficient (pivot " +
                        std::to_string(e.pivot()) + ")";
    }
}

Vector mean_response(const Matrix& X, const Vector& beta) {
    if (X.cols != static_cast<int>(beta.size()))
        throw ContractError("mean_response: dimension mismatch");
    Vector mu(static_cast<size_t>(X.rows));
    for (int i = 0; i < X.rows; ++i) {
        double eta = 0.0;
        for (int j = 0; j < X.cols; ++j) eta += X(i, j) * beta[j];
        if (!(std::abs(eta) <= 700.0))
            throw NumericRangeError("mean_response: linear predictor overflows exp at row " +
                                        std::to_string(i),
                                    i);
        mu[i] = std::exp(eta);
    }
    return mu;
}

double gamma_log_density(double y, double zeta, double mu) {
    if (!(y > 0.0) || !(zeta > 0.0) || !(mu > 0.0))
        throw DomainError("gamma_log_density: y, zeta, mu must all be positive");
    const double inv_zeta = 1.0 / zeta;
    return (inv_zeta - 1.0) * std::log(y) - y / (mu * zeta) -
           inv_zeta * std::log(zeta * mu) - log_gamma(inv_zeta);
}

double log_likelihood(const Dataset& data, const Vector& beta) {
    const double zeta = data.zeta;
    const double inv_zeta = 1.0 / zeta;
    double sum_core = 0.0;   // sum_i [ y_i e^{-eta_i} + eta_i ]
    double sum_log_y = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        double eta = 0.0;
        for (int j = 0; j < data.p(); ++j) eta += data.X(i, j) * beta[j];
        if (!(std::abs(eta) <= 700.0))
            throw NumericRangeError("log_likelihood: linear predictor overflows exp at row " +
                                        std::to_string(i),
                                    i);
        sum_core += data.y[i] * std::exp(-eta) + eta;
        sum_log_y += std::log(data.y[i]);
    }
    const double n = static_cast<double>(data.n());
    return -inv_zeta * sum_core + (1.0 - zeta) * inv_zeta * sum_log_y -
           n * inv_zeta * std::log(zeta) - n * log_gamma(inv_zeta);
}

Vector score(const Dataset& data, const Vector& beta) {
    const double inv_zeta = 1.0 / data.zeta;
    Vector g(static_cast<size_t>(data.p()), 0.0);
    for (int i = 0; i < data.n(); ++i) {
        double eta = 0.0;
        for (int j = 0; j < data.p(); ++j) eta += data.X(i, j) * beta[j];
        if (!(std::abs(eta) <= 700.0))
            throw NumericRangeError("score: linear predictor overflows exp at row " +
                                        std::to_string(i),
                                    i);
        const double w = data.y[i] * std::exp(-eta) - 1.0;
        for (int j = 0; j < data.p(); ++j) g[j] += w * data.X(i, j);
    }
    for (double& v : g) v *= inv_zeta;
    return g;
}

Matrix weighted_crossproduct(const Dataset& data, const Vector& mu) {
    if (static_cast<int>(mu.size()) != data.n())
        throw ContractError("weighted_crossproduct: mu length does not match X rows");
    Vector w(mu.size());
    for (size_t i = 0; i < mu.size(); ++i) {
        if (!(mu[i] > 0.0)) throw DomainError("weighted_crossproduct: mu must be positive");
        w[i] = mu[i] * mu[i];
    }
    return weighted_gram(data.X, w);
}

} // namespace gammareg
