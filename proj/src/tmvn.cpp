#include "gammareg/tmvn.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gammareg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Standardized width below which uniform proposals beat everything else.
constexpr double kNarrowWidth = 0.5;
// Standardized lower bound above which the tail-exponential proposal beats
// plain normal rejection on a one-sided interval.
constexpr double kTailThreshold = 0.25;
// Beyond this many sigmas the interval mass underflows any double.
constexpr double kHopelessTail = 38.0;

// Standardized draw from N(0,1) on [a, inf), a > kTailThreshold:
// translated-exponential proposal with rate (a + sqrt(a^2 + 4)) / 2.
double tail_exponential(RngStream& rng, double a) {
    const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a + rng.exponential(lambda);
        const double d = z - lambda;
        if (std::log(rng.uniform()) <= -0.5 * d * d) return z;
    }
}

// Standardized draw on finite [a, b]: uniform proposal bounded by the
// largest density value on the interval.
double narrow_uniform(RngStream& rng, double a, double b) {
    const double mode_point = (a > 0.0) ? a : (b < 0.0 ? b : 0.0);
    for (;;) {
        const double z = a + (b - a) * rng.uniform();
        const double log_accept = 0.5 * (mode_point * mode_point - z * z);
        if (std::log(rng.uniform()) <= log_accept) return z;
    }
}

// Standardized one-sided draw on [a, inf).
double one_sided(RngStream& rng, double a) {
    if (a <= kTailThreshold) {
        double z;
        do z = rng.normal();
        while (z < a);
        return z;
    }
    return tail_exponential(rng, a);
}

// Standardized draw on [a, b] with 0 < a (mode below the interval, wide):
// one-sided sampler toward a, discarding draws past b.
double tail_two_sided(RngStream& rng, double a, double b) {
    for (;;) {
        const double z = one_sided(rng, a);
        if (z <= b) return z;
    }
}

double sample_standard_tn(RngStream& rng, double a, double b) {
    // No truncation.
    if (a == -kInf && b == kInf) return rng.normal();
    // Mirror so the live boundary sits on the left / below the mode cases
    // reduce to above-the-mode ones.
    if (a == -kInf) return -sample_standard_tn(rng, -b, kInf);
    if (b <= 0.0 && b != kInf) return -sample_standard_tn(rng, -b, -a);

    if (a >= kHopelessTail)
        throw DegenerateTruncationError("sample_tn_univariate: interval mass below 1e-300");

    if (b == kInf) return one_sided(rng, a);
    if (b - a < kNarrowWidth) return narrow_uniform(rng, a, b);
    if (a <= 0.0) {
        // Mode covered and width >= 0.5: plain normal rejection.
        double z;
        do z = rng.normal();
        while (z < a || z > b);
        return z;
    }
    return tail_two_sided(rng, a, b);
}

} // namespace

double sample_tn_univariate(RngStream& rng, double mu, double sigma, double lo, double hi) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("sample_tn_univariate: sigma must be positive and finite");
    if (!(lo < hi))
        throw ContractError("sample_tn_univariate: need lo < hi");
    const double a = (lo == -kInf) ? -kInf : (lo - mu) / sigma;
    const double b = (hi == kInf) ? kInf : (hi - mu) / sigma;
    if (a >= kHopelessTail || b <= -kHopelessTail)
        throw DegenerateTruncationError("sample_tn_univariate: interval mass below 1e-300");
    const double z = sample_standard_tn(rng, a, b);
    // Clamp against the one-ulp excursions mirroring can produce.
    return std::min(std::max(mu + sigma * z, lo), hi);
}

TmvnSpec make_tmvn_spec(Vector mean, Matrix covariance, LinearRestrictions restrictions) {
    const int p = static_cast<int>(mean.size());
    if (covariance.rows != p || covariance.cols != p)
        throw ContractError("tmvn: covariance dimensions do not match mean");
    if (!restrictions.empty() && restrictions.p() != p)
        throw ContractError("tmvn: restriction columns do not match dimension");
    TmvnSpec spec;
    spec.precision = inverse_spd(covariance);
    spec.mean = std::move(mean);
    spec.covariance = std::move(covariance);
    spec.restrictions = std::move(restrictions);
    return spec;
}

Vector gibbs_sweep(RngStream& rng, const TmvnSpec& spec, const Vector& state) {
    const int p = static_cast<int>(spec.mean.size());
    if (static_cast<int>(state.size()) != p)
        throw ContractError("gibbs_sweep: state dimension mismatch");
    if (!spec.restrictions.empty() && !satisfies(spec.restrictions, state))
        throw ContractError("gibbs_sweep: input state violates the restrictions");

    Vector x = state;
    for (int j = 0; j < p; ++j) {
        const double omega_jj = spec.precision(j, j);
        double cross = 0.0;
        for (int k = 0; k < p; ++k)
            if (k != j) cross += spec.precision(j, k) * (x[k] - spec.mean[k]);
        const double cond_mean = spec.mean[j] - cross / omega_jj;
        const double cond_sd = std::sqrt(1.0 / omega_jj);

        double lo = -kInf, hi = kInf;
        if (!spec.restrictions.empty()) {
            const Interval iv = coordinate_interval(spec.restrictions, j, x);
            lo = iv.lo;
            hi = iv.hi;
        }
        x[j] = sample_tn_univariate(rng, cond_mean, cond_sd, lo, hi);
    }
    return x;
}

Matrix sample_tmvn(RngStream& rng, const TmvnSpec& spec, int n_draws, int burn, int thin,
                   const Vector* init) {
    if (n_draws < 1) throw ContractError("sample_tmvn: need n_draws >= 1");
    if (thin < 1) throw ContractError("sample_tmvn: need thin >= 1");
    const int p = static_cast<int>(spec.mean.size());

    Vector state;
    if (init != nullptr) {
        if (!spec.restrictions.empty() && !satisfies(spec.restrictions, *init))
            throw ContractError("sample_tmvn: init point violates the restrictions");
        state = *init;
    } else {
        state = feasible_start(spec.restrictions, spec.mean);
    }

    for (int i = 0; i < burn; ++i) state = gibbs_sweep(rng, spec, state);

    Matrix draws(n_draws, p);
    for (int d = 0; d < n_draws; ++d) {
        for (int t = 0; t < thin; ++t) state = gibbs_sweep(rng, spec, state);
        for (int j = 0; j < p; ++j) draws(d, j) = state[j];
    }
    return draws;
}

} // namespace gammareg
