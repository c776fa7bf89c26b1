#ifndef GAMMAREG_NUMERICS_HPP
#define GAMMAREG_NUMERICS_HPP

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "gammareg/errors.hpp"

namespace gammareg {

using Vector = std::vector<double>;

// Dense row-major matrix.  Sizes in this library stay small (p <= 10 in
// every paper workload), so everything below is plain O(n^3) code.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    static Matrix identity(int n);
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
// X^T diag(w) X; pass w = ones for the plain cross-product.
Matrix weighted_gram(const Matrix& x, const Vector& w);
Matrix gram(const Matrix& x);
double max_abs(const Matrix& a);
double inf_norm(const Vector& v);
double dot(const Vector& a, const Vector& b);

struct SymmetricEigen {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // column j pairs with eigenvalues[j]
};

// Cyclic Jacobi rotations.  Throws ContractError when A is measurably
// asymmetric, relative to max(1, |A|_max).
SymmetricEigen sym_eigen(const Matrix& a);

// Cholesky-based SPD solve; SingularityError carries the failing pivot.
Matrix solve_spd(const Matrix& a, const Matrix& b);
Vector solve_spd(const Matrix& a, const Vector& b);
Matrix inverse_spd(const Matrix& a);
// Lower Cholesky factor of an SPD matrix.
Matrix cholesky(const Matrix& a);

// sqrt(lambda_max / lambda_min) of a symmetric positive definite matrix.
double condition_number(const Matrix& a);

// ln Gamma(x), x > 0.  Lanczos; relative error below 1e-12 on [1e-6, 1e6].
double log_gamma(double x);

// Regularized lower incomplete gamma P(a, x).
double reg_lower_inc_gamma(double a, double x);

// Digamma psi(x), x > 0.
double digamma(double x);

// Deterministic seeded random stream.  Identical (base_seed, stream_id)
// reproduce the identical draw sequence; distinct stream ids give
// statistically independent streams.  Single-owner: never share one stream
// across concurrent tasks.
class RngStream {
public:
    RngStream(uint64_t base_seed, uint64_t stream_id = 0);

    uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    // Gamma(shape, scale): Marsaglia-Tsang squeeze/rejection for shape >= 1,
    // boosted through G(a) = G(a+1) * U^(1/a) for shape < 1.
    double gamma(double shape, double scale);
    double exponential(double rate);

private:
    uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// Folds an index tuple into a single substream id, so that e.g.
// (scenario, replication, purpose) maps to its own independent stream.
uint64_t stream_index(std::initializer_list<uint64_t> parts);

} // namespace gammareg

#endif
