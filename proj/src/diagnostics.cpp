#include "gammareg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gammareg {

namespace {

double trigamma(double x) {
    double result = 0.0;
    while (x < 6.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 - inv2 * (1.0 / 30.0 -
                     inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0))))));
    return result;
}

} // namespace

std::pair<double, double> fit_gamma_univariate(const Vector& y) {
    const int n = static_cast<int>(y.size());
    if (n < 3) throw ContractError("fit_gamma_univariate: need at least 3 observations");
    double mean = 0.0, mean_log = 0.0;
    for (double v : y) {
        if (!(v > 0.0)) throw DomainError("fit_gamma_univariate: responses must be positive");
        mean += v;
        mean_log += std::log(v);
    }
    mean /= n;
    mean_log /= n;

    // s = ln(mean) - mean(ln y) > 0 unless the sample is constant.
    const double s = std::log(mean) - mean_log;
    if (!(s > 1e-14))
        throw DegeneracyError("fit_gamma_univariate: sample is (numerically) constant");

    double shape = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    // g(k) = ln k - digamma(k) - s is strictly decreasing with a unique root;
    // Newton with a bisection bracket as safety net.
    double lo = 1e-12, hi = shape;
    while (std::log(hi) - digamma(hi) - s > 0.0) hi *= 2.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double g = std::log(shape) - digamma(shape) - s;
        if (g > 0.0)
            lo = shape;
        else
            hi = shape;
        const double gprime = 1.0 / shape - trigamma(shape);
        double next = shape - g / gprime;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - shape) < 1e-12 * std::max(1.0, shape)) {
            shape = next;
            break;
        }
        shape = next;
    }
    return {shape, mean / shape};
}

double ad_statistic(const Vector& y, double shape, double scale, bool* clamped) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw DomainError("ad_statistic: shape and scale must be positive");
    const int n = static_cast<int>(y.size());
    if (n < 1) throw ContractError("ad_statistic: empty sample");

    Vector sorted = y;
    std::sort(sorted.begin(), sorted.end());
    bool any_clamped = false;
    Vector f(sorted.size());
    for (int i = 0; i < n; ++i) {
        double v = reg_lower_inc_gamma(shape, sorted[i] / scale);
        if (v < 1e-300) {
            v = 1e-300;
            any_clamped = true;
        }
        if (v > 1.0 - 1e-16) {
            v = 1.0 - 1e-16;
            any_clamped = true;
        }
        f[i] = v;
    }
    if (clamped) *clamped = any_clamped;

    double sum = 0.0;
    for (int i = 1; i <= n; ++i)
        sum += (2.0 * i - 1.0) * (std::log(f[i - 1]) + std::log(1.0 - f[n - i]));
    return -n - sum / n;
}

Vector ad_bootstrap_null_samples(RngStream& rng, double shape, double scale, int n, int B,
                                 int threads) {
    if (B < 1) throw ContractError("ad_bootstrap_null_samples: need B >= 1");
    // Harvest one seed per replicate up front so threading cannot change
    // the draws.
    std::vector<uint64_t> seeds(static_cast<size_t>(B));
    for (int b = 0; b < B; ++b) seeds[b] = rng.next_u64();

    Vector stats(static_cast<size_t>(B), 0.0);
    bool degenerate = false;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (threads != 1) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
    for (int b = 0; b < B; ++b) {
        try {
            RngStream rep_rng(seeds[static_cast<size_t>(b)], 0);
            Vector synth(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) synth[i] = rep_rng.gamma(shape, scale);
            const auto [s2, sc2] = fit_gamma_univariate(synth);
            stats[static_cast<size_t>(b)] = ad_statistic(synth, s2, sc2);
        } catch (const Error&) {
            degenerate = true;
        }
    }
    if (degenerate)
        throw DegeneracyError("ad_bootstrap_null_samples: a bootstrap refit was degenerate");
    return stats;
}

double ad_pvalue_bootstrap_serial(RngStream& rng, const Vector& y, int B) {
    return ad_pvalue_bootstrap(rng, y, B, 1);
}

double ad_pvalue_bootstrap(RngStream& rng, const Vector& y, int B, int threads) {
    if (B < 200) throw ContractError("ad_pvalue_bootstrap: need B >= 200");
    const auto [shape, scale] = fit_gamma_univariate(y);
    const double observed = ad_statistic(y, shape, scale);
    const Vector null_stats =
        ad_bootstrap_null_samples(rng, shape, scale, static_cast<int>(y.size()), B, threads);
    int count = 0;
    for (double s : null_stats) count += (s >= observed) ? 1 : 0;
    return (1.0 + count) / (B + 1.0);
}

GofReport gamma_gof(RngStream& rng, const Vector& y, int bootstrap_B, int threads) {
    GofReport report;
    const auto [shape, scale] = fit_gamma_univariate(y);
    report.fitted_shape = shape;
    report.fitted_scale = scale;
    report.ad_statistic = ad_statistic(y, shape, scale, &report.cdf_clamped);
    report.p_value = ad_pvalue_bootstrap(rng, y, bootstrap_B, threads);
    return report;
}

Matrix correlation_matrix(const Matrix& X) {
    const int n = X.rows, p = X.cols;
    if (n < 2) throw ContractError("correlation_matrix: need at least 2 rows");
    Vector mean(static_cast<size_t>(p), 0.0), sd(static_cast<size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) mean[j] += X(i, j);
        mean[j] /= n;
        for (int i = 0; i < n; ++i) sd[j] += (X(i, j) - mean[j]) * (X(i, j) - mean[j]);
        if (!(sd[j] > 0.0))
            throw DegeneracyError("correlation_matrix: column " + std::to_string(j) +
                                  " is constant");
        sd[j] = std::sqrt(sd[j]);
    }
    Matrix corr(p, p, 0.0);
    for (int j = 0; j < p; ++j) {
        corr(j, j) = 1.0;
        for (int k = j + 1; k < p; ++k) {
            double cov = 0.0;
            for (int i = 0; i < n; ++i) cov += (X(i, j) - mean[j]) * (X(i, k) - mean[k]);
            const double r = std::min(1.0, std::max(-1.0, cov / (sd[j] * sd[k])));
            corr(j, k) = corr(k, j) = r;
        }
    }
    return corr;
}

ConditionReport multicollinearity_condition_number(const Dataset& data,
                                                   const FitResult& fit) {
    if (!fit.converged)
        throw ContractError("multicollinearity_condition_number: fit did not converge");
    ConditionReport report;
    report.weighted = condition_number(weighted_crossproduct(data, fit.mu_hat));
    report.unweighted = condition_number(gram(data.X));
    return report;
}

} // namespace gammareg
