#ifndef GAMMAREG_DIAGNOSTICS_HPP
#define GAMMAREG_DIAGNOSTICS_HPP

#include <utility>

#include "gammareg/estimators.hpp"

namespace gammareg {

struct GofReport {
    double ad_statistic = 0.0;
    double p_value = 1.0; // parametric bootstrap, never table lookup
    double fitted_shape = 0.0;
    double fitted_scale = 0.0;
    bool cdf_clamped = false; // an F(y) hit machine 0/1 and was clamped
};

// Marginal gamma ML fit: shape solves ln(shape) - digamma(shape) =
// ln(mean y) - mean(ln y) by bracketed Newton; scale = mean(y)/shape.
std::pair<double, double> fit_gamma_univariate(const Vector& y);

// Anderson-Darling statistic of y against Gamma(shape, scale), with the
// F values clamped to [1e-300, 1 - 1e-16]; *clamped reports whether any
// clamp fired.
double ad_statistic(const Vector& y, double shape, double scale, bool* clamped = nullptr);

// Null distribution of A2 under estimated parameters: B synthetic samples of
// size n from Gamma(shape, scale), each refit before its statistic is taken.
Vector ad_bootstrap_null_samples(RngStream& rng, double shape, double scale, int n, int B,
                                 int threads = 0);

// Parametric bootstrap p-value: refit and recompute A2 on B synthetic
// samples; p = (1 + #{A2_b >= A2_obs}) / (B + 1).  threads as in run_grid.
double ad_pvalue_bootstrap(RngStream& rng, const Vector& y, int B, int threads = 0);
double ad_pvalue_bootstrap_serial(RngStream& rng, const Vector& y, int B);

GofReport gamma_gof(RngStream& rng, const Vector& y, int bootstrap_B = 1000,
                    int threads = 0);

// Pearson correlations; DegeneracyError names any constant column.
Matrix correlation_matrix(const Matrix& X);

struct ConditionReport {
    double weighted = 0.0;   // condition number of X^T diag(mu_hat^2) X
    double unweighted = 0.0; // condition number of X^T X
};

ConditionReport multicollinearity_condition_number(const Dataset& data, const FitResult& fit);

} // namespace gammareg

#endif
