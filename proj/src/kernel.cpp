#include "ocksr/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "ocksr/kernels.hpp"
#include "ocksr/linalg.hpp"

namespace ocksr {

namespace {

constexpr double kDuplicateDistance = 1e-12;

void check_params(const KernelParams& params) {
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma))
        throw DomainError("kernel bandwidth must be positive and finite");
}

}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> z,
                  const KernelParams& params) {
    if (x.size() != z.size()) throw DimensionMismatch("kernel arguments differ in dimension");
    check_params(params);
    const double d2 = kernels::sqdist(x.data(), z.data(), x.size());
    return std::exp(-d2 / (2.0 * params.sigma * params.sigma));
}

GramMatrix gram_matrix(const SampleMatrix& x, const KernelParams& params) {
    check_params(params);
    const std::size_t n = x.n;
    const double inv = 1.0 / (2.0 * params.sigma * params.sigma);
    SymMatrix k(n);
    for (std::size_t i = 0; i < n; ++i) {
        k.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d2 = kernels::sqdist(x.rows.row(i), x.rows.row(j), x.d);
            if (d2 < kDuplicateDistance * kDuplicateDistance) throw DuplicateSamples(i, j);
            k.set(i, j, std::exp(-d2 * inv));
        }
    }
    return GramMatrix{params, std::move(k), 1.0};
}

Matrix cross_kernel(const SampleMatrix& train, const SampleMatrix& test,
                    const KernelParams& params) {
    check_params(params);
    if (train.d != test.d) throw DimensionMismatch("train/test feature dimensions differ");
    const double inv = 1.0 / (2.0 * params.sigma * params.sigma);
    Matrix k(test.n, train.n);
    for (std::size_t i = 0; i < test.n; ++i)
        for (std::size_t j = 0; j < train.n; ++j)
            k(i, j) = std::exp(-kernels::sqdist(test.rows.row(i), train.rows.row(j), train.d) * inv);
    return k;
}

KernelParams median_bandwidth(const SampleMatrix& x) {
    if (x.n < 2) throw DomainError("bandwidth selection needs at least two samples");
    std::vector<double> dist;
    dist.reserve(x.n * (x.n - 1) / 2);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = i + 1; j < x.n; ++j)
            dist.push_back(std::sqrt(kernels::sqdist(x.rows.row(i), x.rows.row(j), x.d)));

    const std::size_t m = dist.size();
    const std::size_t mid = m / 2;
    std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
    double med = dist[mid];
    if (m % 2 == 0) {
        std::nth_element(dist.begin(), dist.begin() + (mid - 1), dist.begin() + mid);
        med = 0.5 * (med + dist[mid - 1]);
    }
    if (med < kDuplicateDistance)
        throw DegenerateData("median pairwise distance is (near) zero");
    return KernelParams{med};
}

SampleMatrix normalize_features(const SampleMatrix& x) {
    SampleMatrix out = x;
    for (std::size_t i = 0; i < x.n; ++i) {
        const double n = norm2(x.sample(i));
        if (n <= 1e-300)
            throw ZeroSample("row " + std::to_string(i) + " has zero norm");
        double* r = out.rows.row(i);
        for (std::size_t j = 0; j < x.d; ++j) r[j] /= n;
    }
    return out;
}

GramMatrix spectral_rescale(const GramMatrix& g) {
    const EigenSummary es = extreme_eigenvalues(g.matrix);
    const double factor = 1.0 / es.lambda_max;
    GramMatrix out;
    out.params = g.params;
    out.matrix = g.matrix.scaled(factor);
    out.spectral_scale = g.spectral_scale * factor;
    return out;
}

}  // namespace ocksr
