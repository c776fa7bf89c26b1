#ifndef GAMMAREG_RESTRICTIONS_HPP
#define GAMMAREG_RESTRICTIONS_HPP

#include "gammareg/numerics.hpp"

namespace gammareg {

// Linear inequality system R beta <= r.  m may exceed p.  Construction
// rejects rows that are trivially infeasible (all-zero coefficients with a
// negative bound).
class LinearRestrictions {
public:
    LinearRestrictions() = default;
    LinearRestrictions(Matrix R, Vector r);

    const Matrix& R() const { return R_; }
    const Vector& r() const { return r_; }
    int m() const { return R_.rows; }
    int p() const { return R_.cols; }
    bool empty() const { return R_.rows == 0; }

    // Convenience: the simulation prior region beta_j >= bound for all j,
    // stored as -beta_j <= -bound.
    static LinearRestrictions all_coords_at_least(int p, double bound);

private:
    Matrix R_;
    Vector r_;
};

// Boundary tolerance 1e-12 absorbs round-off on the closed region.
bool satisfies(const LinearRestrictions& res, const Vector& beta);

struct Interval {
    double lo;
    double hi;
};

// Feasible range of coordinate j with the other coordinates of beta held
// fixed.  InfeasibleStateError when the range collapses (lo > hi + 1e-10).
Interval coordinate_interval(const LinearRestrictions& res, int j, const Vector& beta);

// Cyclic coordinate projection from hint; each clamped coordinate is nudged
// 1e-6 into the interior.  FeasibilityError when max_passes passes do not
// reach a feasible point.
Vector feasible_start(const LinearRestrictions& res, const Vector& hint, int max_passes = 100);

} // namespace gammareg

#endif
