#include "gammareg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gammareg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_dims(bool ok, const char* what) {
    if (!ok) throw ContractError(std::string("dimension mismatch in ") + what);
}

} // namespace

Matrix Matrix::identity(int n) {
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require_dims(a.cols == b.rows, "matmul");
    Matrix c(a.rows, b.cols, 0.0);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    require_dims(a.cols == static_cast<int>(x.size()), "matvec");
    Vector y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Matrix weighted_gram(const Matrix& x, const Vector& w) {
    require_dims(x.rows == static_cast<int>(w.size()), "weighted_gram");
    const int p = x.cols;
    Matrix g(p, p, 0.0);
    for (int i = 0; i < x.rows; ++i) {
        const double wi = w[i];
        for (int j = 0; j < p; ++j) {
            const double xij = wi * x(i, j);
            for (int k = j; k < p; ++k) g(j, k) += xij * x(i, k);
        }
    }
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < j; ++k) g(j, k) = g(k, j);
    return g;
}

Matrix gram(const Matrix& x) {
    return weighted_gram(x, Vector(static_cast<size_t>(x.rows), 1.0));
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::abs(v));
    return m;
}

double inf_norm(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const Vector& a, const Vector& b) {
    require_dims(a.size() == b.size(), "dot");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// ---------------------------------------------------------------------------
// Eigen decomposition: cyclic Jacobi sweeps.

SymmetricEigen sym_eigen(const Matrix& a) {
    require_dims(a.rows == a.cols, "sym_eigen");
    const int n = a.rows;
    const double scale = std::max(1.0, max_abs(a));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale)
                throw ContractError("sym_eigen: input matrix is not symmetric");

    Matrix m = a;
    // Symmetrize exactly so the sweeps preserve symmetry bit-for-bit.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = m(j, i) = v;
        }

    Matrix v = Matrix::identity(n);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off <= 1e-26 * scale * scale) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = m(p, p);
                const double aqq = m(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return m(i, i) < m(j, j); });

    SymmetricEigen out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = m(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cholesky machinery.

Matrix cholesky(const Matrix& a) {
    require_dims(a.rows == a.cols, "cholesky");
    const int n = a.rows;
    Matrix l(n, n, 0.0);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw SingularityError("cholesky: matrix is not positive definite at pivot " +
                                       std::to_string(j),
                                   j);
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
    require_dims(a.rows == b.rows, "solve_spd");
    const Matrix l = cholesky(a);
    const int n = a.rows;
    Matrix x = b;
    for (int col = 0; col < b.cols; ++col) {
        // forward: L z = b
        for (int i = 0; i < n; ++i) {
            double s = x(i, col);
            for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
            x(i, col) = s / l(i, i);
        }
        // backward: L^T x = z
        for (int i = n - 1; i >= 0; --i) {
            double s = x(i, col);
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k, col);
            x(i, col) = s / l(i, i);
        }
    }
    return x;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
    Matrix rhs(static_cast<int>(b.size()), 1);
    for (size_t i = 0; i < b.size(); ++i) rhs(static_cast<int>(i), 0) = b[i];
    const Matrix x = solve_spd(a, rhs);
    Vector out(b.size());
    for (size_t i = 0; i < b.size(); ++i) out[i] = x(static_cast<int>(i), 0);
    return out;
}

Matrix inverse_spd(const Matrix& a) {
    return solve_spd(a, Matrix::identity(a.rows));
}

double condition_number(const Matrix& a) {
    const SymmetricEigen eig = sym_eigen(a);
    const double lo = eig.eigenvalues.front();
    const double hi = eig.eigenvalues.back();
    if (!(lo > 0.0))
        throw SingularityError("condition_number: smallest eigenvalue is not positive", 0);
    return std::sqrt(hi / lo);
}

// ---------------------------------------------------------------------------
// Special functions.

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma: argument must be positive and finite");

    // Lanczos, g = 7, 9 terms.
    static const double kCoef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,    12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};

    if (x < 0.5) {
        // Reflection keeps full relative accuracy near zero.
        return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double acc = kCoef[0];
    for (int i = 1; i < 9; ++i) acc += kCoef[i] / (z + i);
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double reg_lower_inc_gamma(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a) || x < 0.0 || !std::isfinite(x))
        throw DomainError("reg_lower_inc_gamma: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;

    const double lg = log_gamma(a);
    if (x < a + 1.0) {
        // Series for P(a, x).
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction for Q(a, x), modified Lentz.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("digamma: argument must be positive and finite");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Asymptotic series ln x - 1/(2x) - sum B_2n / (2n x^(2n)).
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
                      inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

// ---------------------------------------------------------------------------
// RngStream: xoshiro256++ seeded through SplitMix64.

namespace {

struct SplitMix64 {
    uint64_t state;
    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream(uint64_t base_seed, uint64_t stream_id) {
    SplitMix64 seeder{base_seed};
    const uint64_t k0 = seeder.next();
    const uint64_t k1 = seeder.next();
    SplitMix64 st{stream_id ^ k0};
    s_[0] = st.next() ^ k1;
    s_[1] = st.next();
    s_[2] = st.next();
    s_[3] = st.next();
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 1;
}

uint64_t RngStream::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    // (k + 0.5) / 2^53 lies strictly inside (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 1.1102230246251565e-16;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * f;
    has_cached_normal_ = true;
    return u * f;
}

double RngStream::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw DomainError("gamma: shape and scale must be positive and finite");

    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential: rate must be positive");
    return -std::log(uniform()) / rate;
}

uint64_t stream_index(std::initializer_list<uint64_t> parts) {
    uint64_t h = 0x243F6A8885A308D3ull;
    for (uint64_t p : parts) h = mix64(h ^ (p + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
    return h;
}

} // namespace gammareg
