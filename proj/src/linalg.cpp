#include "ocksr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocksr/kernels.hpp"

namespace ocksr {

namespace {

constexpr double kPivotRel = 1e-12;
constexpr double kNormFloor = 1e-300;
constexpr int kQlMaxSweeps = 64;

}  // namespace

double norm2(std::span<const double> v) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::fabs(x));
    if (peak == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) {
        const double t = x / peak;
        s += t * t;
    }
    return peak * std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<double> normalize_unit(std::span<const double> v) {
    const double n = norm2(v);
    if (n <= kNormFloor) throw ZeroVector("cannot normalize a (near) zero vector");
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x /= n;
    return out;
}

std::vector<double> sym_matvec(const SymMatrix& a, std::span<const double> x) {
    const std::size_t n = a.size();
    if (x.size() != n) throw DimensionMismatch("matvec length mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = kernels::dot(a.row(i), x.data(), n);
    return y;
}

CholeskyFactor cholesky_decompose(const SymMatrix& a) {
    const std::size_t n = a.size();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
    const double pivot_floor = kPivotRel * std::max(max_diag, 0.0);

    Matrix l(n, n, 0.0);
    // Sherman's march: each column of L is completed before the next one,
    // using inner products over already-finished row prefixes.
    for (std::size_t j = 0; j < n; ++j) {
        const double pivot = a(j, j) - kernels::dot(l.row(j), l.row(j), j);
        if (!(pivot > pivot_floor))
            throw NotPositiveDefinite("pivot " + std::to_string(pivot) + " at column " +
                                      std::to_string(j) + " below tolerance");
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i)
            l(i, j) = (a(i, j) - kernels::dot(l.row(i), l.row(j), j)) / ljj;
    }
    return CholeskyFactor{n, std::move(l)};
}

std::vector<double> solve_spd(const CholeskyFactor& factor, std::span<const double> b) {
    const std::size_t n = factor.n;
    if (b.size() != n) throw DimensionMismatch("right-hand side length mismatch");
    const Matrix& l = factor.lower;

    std::vector<double> x(b.begin(), b.end());
    // L z = b
    for (std::size_t i = 0; i < n; ++i)
        x[i] = (x[i] - kernels::dot(l.row(i), x.data(), i)) / l(i, i);
    // L^T y = z, written as prefix updates so the accesses stay row-contiguous
    for (std::size_t ir = n; ir-- > 0;) {
        x[ir] /= l(ir, ir);
        kernels::axpy(-x[ir], l.row(ir), x.data(), ir);
    }
    return x;
}

namespace {

// Householder reduction to tridiagonal form, eigenvalues only. On return d
// holds the diagonal and e[1..n-1] the sub-diagonal.
void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        if (i == 1) break;
    }
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

// Implicit-shift QL sweeps on a symmetric tridiagonal (d, e); e[0] unused.
void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = d.size();
    if (n == 1) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == kQlMaxSweeps)
                    throw NoConvergence("eigenvalue iteration budget exhausted");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool underflow = false;
                for (std::size_t iq = m; iq-- > l;) {
                    double f = s * e[iq];
                    const double b = c * e[iq];
                    r = std::hypot(f, g);
                    e[iq + 1] = r;
                    if (r == 0.0) {  // recover from a vanishing rotation
                        d[iq + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[iq + 1] - p;
                    r = (d[iq] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[iq + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const SymMatrix& a) {
    const std::size_t n = a.size();
    std::vector<double> d(n, 0.0);
    if (n == 1) {
        d[0] = a(0, 0);
        return d;
    }
    Matrix work = a.dense();
    std::vector<double> e(n, 0.0);
    tridiagonalize(work, d, e);
    ql_implicit_shift(d, e);
    return d;
}

EigenSummary extreme_eigenvalues(const SymMatrix& a) {
    const std::vector<double> ev = symmetric_eigenvalues(a);
    const auto [mn, mx] = std::minmax_element(ev.begin(), ev.end());
    EigenSummary s;
    s.lambda_min = *mn;
    s.lambda_max = *mx;
    s.condition = (s.lambda_min != 0.0) ? s.lambda_max / s.lambda_min
                                        : std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace ocksr
