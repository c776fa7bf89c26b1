#include "gammareg/restrictions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gammareg {

namespace {
constexpr double kBoundaryTol = 1e-12;
constexpr double kCollapseTol = 1e-10;
constexpr double kInteriorNudge = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

LinearRestrictions::LinearRestrictions(Matrix R, Vector r)
    : R_(std::move(R)), r_(std::move(r)) {
    if (R_.rows != static_cast<int>(r_.size()))
        throw ContractError("restrictions: R rows and r length differ");
    for (int i = 0; i < R_.rows; ++i) {
        bool all_zero = true;
        for (int j = 0; j < R_.cols; ++j)
            if (R_(i, j) != 0.0) {
                all_zero = false;
                break;
            }
        if (all_zero && r_[i] < 0.0)
            throw ContractError("restrictions: row " + std::to_string(i) +
                                " is trivially infeasible (0 <= negative bound)");
    }
}

LinearRestrictions LinearRestrictions::all_coords_at_least(int p, double bound) {
    Matrix R(p, p, 0.0);
    Vector r(static_cast<size_t>(p), -bound);
    for (int j = 0; j < p; ++j) R(j, j) = -1.0;
    return LinearRestrictions(std::move(R), std::move(r));
}

bool satisfies(const LinearRestrictions& res, const Vector& beta) {
    if (res.empty()) return true;
    if (res.p() != static_cast<int>(beta.size()))
        throw ContractError("satisfies: beta length does not match restriction columns");
    for (int i = 0; i < res.m(); ++i) {
        double lhs = 0.0;
        for (int j = 0; j < res.p(); ++j) lhs += res.R()(i, j) * beta[j];
        if (lhs > res.r()[i] + kBoundaryTol) return false;
    }
    return true;
}

Interval coordinate_interval(const LinearRestrictions& res, int j, const Vector& beta) {
    if (j < 0 || j >= res.p() || res.p() != static_cast<int>(beta.size()))
        throw ContractError("coordinate_interval: bad coordinate or beta length");
    double lo = -kInf, hi = kInf;
    for (int i = 0; i < res.m(); ++i) {
        const double rij = res.R()(i, j);
        if (rij == 0.0) continue;
        double rest = 0.0;
        for (int k = 0; k < res.p(); ++k)
            if (k != j) rest += res.R()(i, k) * beta[k];
        const double bound = (res.r()[i] - rest) / rij;
        if (rij > 0.0)
            hi = std::min(hi, bound);
        else
            lo = std::max(lo, bound);
    }
    if (lo > hi + kCollapseTol)
        throw InfeasibleStateError("coordinate_interval: interval for coordinate " +
                                   std::to_string(j) + " collapsed (state infeasible)");
    return {lo, hi};
}

Vector feasible_start(const LinearRestrictions& res, const Vector& hint, int max_passes) {
    if (res.empty()) return hint;
    Vector beta = hint;
    if (res.p() != static_cast<int>(beta.size()))
        throw ContractError("feasible_start: hint length does not match restriction columns");
    if (satisfies(res, beta)) return beta;

    for (int pass = 0; pass < max_passes; ++pass) {
        for (int j = 0; j < res.p(); ++j) {
            Interval iv;
            try {
                iv = coordinate_interval(res, j, beta);
            } catch (const InfeasibleStateError&) {
                continue; // other coordinates still to be projected this pass
            }
            if (beta[j] < iv.lo)
                beta[j] = std::isinf(iv.hi) ? iv.lo + kInteriorNudge
                                            : std::min(iv.lo + kInteriorNudge,
                                                       0.5 * (iv.lo + iv.hi));
            else if (beta[j] > iv.hi)
                beta[j] = std::isinf(iv.lo) ? iv.hi - kInteriorNudge
                                            : std::max(iv.hi - kInteriorNudge,
                                                       0.5 * (iv.lo + iv.hi));
        }
        if (satisfies(res, beta)) return beta;
    }
    throw FeasibilityError(
        "feasible_start: no feasible point found after " + std::to_string(max_passes) +
        " passes (the region may be empty; supply an interior point explicitly)");
}

} // namespace gammareg
