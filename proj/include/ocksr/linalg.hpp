#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ocksr/matrix.hpp"

namespace ocksr {

struct CholeskyFactor {
    std::size_t n = 0;
    Matrix lower;  // lower triangular, strictly positive diagonal
};

struct EigenSummary {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double condition = 0.0;  // lambda_max / lambda_min
};

// Cholesky factorisation A = L*L^T, computed column by column. A pivot at or
// below 1e-12 times the largest diagonal entry reports NotPositiveDefinite
// (near-duplicate training points make RBF Gram matrices numerically
// semidefinite).
CholeskyFactor cholesky_decompose(const SymMatrix& a);

// Solves A x = b given the factor of A (forward then backward substitution).
std::vector<double> solve_spd(const CholeskyFactor& factor, std::span<const double> b);

// All eigenvalues of a symmetric matrix: Householder tridiagonalisation
// followed by implicit-shift QL iteration. Throws NoConvergence if an
// off-diagonal fails to deflate within the iteration budget.
std::vector<double> symmetric_eigenvalues(const SymMatrix& a);

// Smallest/largest eigenvalue and their ratio.
EigenSummary extreme_eigenvalues(const SymMatrix& a);

// v / ||v||_2. Throws ZeroVector when the norm underflows (<= 1e-300).
std::vector<double> normalize_unit(std::span<const double> v);

// Euclidean norm, scaled to avoid overflow/underflow of the squared sum.
double norm2(std::span<const double> v);

double norm_inf(std::span<const double> v);

// y = A x for symmetric A (row dot products).
std::vector<double> sym_matvec(const SymMatrix& a, std::span<const double> x);

}  // namespace ocksr
