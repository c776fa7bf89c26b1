#ifndef GAMMAREG_TMVN_HPP
#define GAMMAREG_TMVN_HPP

#include "gammareg/restrictions.hpp"

namespace gammareg {

// p-variate normal truncated to {R beta <= r}.  The precision matrix is
// cached once per spec; Gibbs conditionals read it in O(p) per coordinate.
struct TmvnSpec {
    Vector mean;
    Matrix covariance;
    LinearRestrictions restrictions;
    Matrix precision;
};

TmvnSpec make_tmvn_spec(Vector mean, Matrix covariance, LinearRestrictions restrictions);

// Draw from N(mu, sigma^2) conditioned on [lo, hi] (either side may be
// infinite).  Rejection sampling with regime dispatch: plain normal when the
// interval holds the mode and decent mass, uniform proposals on narrow
// intervals, translated-exponential proposals in the tail.
double sample_tn_univariate(RngStream& rng, double mu, double sigma, double lo, double hi);

// One Gibbs cycle: visits coordinates 1..p in order, sampling each from its
// truncated-normal full conditional.  The state must be feasible on entry
// and stays feasible on exit.
Vector gibbs_sweep(RngStream& rng, const TmvnSpec& spec, const Vector& state);

// Post-burn-in, thinned Gibbs states; one row per draw, every row feasible.
// init must be feasible when given; otherwise one is searched from the mean.
Matrix sample_tmvn(RngStream& rng, const TmvnSpec& spec, int n_draws, int burn = 100,
                   int thin = 1, const Vector* init = nullptr);

} // namespace gammareg

#endif
