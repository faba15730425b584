#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ocksr/matrix.hpp"

namespace ocksr {

// n samples of dimension d, one per row.
struct SampleMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    Matrix rows;

    SampleMatrix() = default;
    SampleMatrix(std::size_t n_, std::size_t d_) : n(n_), d(d_), rows(n_, d_, 0.0) {}

    std::span<const double> sample(std::size_t i) const { return {rows.row(i), d}; }
};

struct KernelParams {
    double sigma = 1.0;  // RBF bandwidth, > 0
};

// RBF kernel matrix over a training set. spectral_scale is 1 for a freshly
// built matrix; spectral_rescale() divides the matrix by its largest
// eigenvalue and records the factor so the original is recoverable.
struct GramMatrix {
    KernelParams params;
    SymMatrix matrix;
    double spectral_scale = 1.0;

    std::size_t size() const { return matrix.size(); }
};

// exp(-||x - z||^2 / (2 sigma^2)), in (0, 1].
double rbf_kernel(std::span<const double> x, std::span<const double> z, const KernelParams& params);

// Pairwise kernel matrix; unit diagonal by construction. Rows closer than
// 1e-12 break positive definiteness and raise DuplicateSamples.
GramMatrix gram_matrix(const SampleMatrix& x, const KernelParams& params);

// (n_test x n_train) kernel evaluations between two sample sets.
Matrix cross_kernel(const SampleMatrix& train, const SampleMatrix& test,
                    const KernelParams& params);

// Median of the n(n-1)/2 pairwise Euclidean distances.
KernelParams median_bandwidth(const SampleMatrix& x);

// Scales every row to unit l2 norm.
SampleMatrix normalize_features(const SampleMatrix& x);

// Divides the matrix by lambda_max so the result has unit spectral norm.
GramMatrix spectral_rescale(const GramMatrix& g);

}  // namespace ocksr
