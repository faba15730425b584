#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ocksr/kernel.hpp"
#include "ocksr/ridge.hpp"

namespace ocksr {

// One state of the least-angle path. The implied l1 penalty at a breakpoint
// is 2 * correlation: every breakpoint is the exact lasso minimiser at that
// penalty (certified by kkt_check).
struct LarsBreakpoint {
    std::vector<std::size_t> active;  // ascending; equals the support of alpha
    std::vector<double> alpha;        // full length
    double correlation = 0.0;         // max |K_j^T (y - K alpha)|
};

struct LarsPath {
    std::size_t n = 0;  // size of the Gram system the path was computed from
    std::vector<LarsBreakpoint> breakpoints;
};

// Fraction of coefficients required to be exactly zero.
struct SparsityTarget {
    double level = 0.0;  // in [0, 1)
};

struct SparsitySelection {
    Coefficients coeffs;              // raw (not normalised)
    double implied_delta = 0.0;       // 2 * correlation of the chosen breakpoint
    bool cardinality_flagged = false; // requested cardinality skipped by a tie/drop
};

struct KktReport {
    bool pass = false;
    std::vector<double> gradient;          // 2 K_j^T (K alpha - y)
    std::vector<std::size_t> violations;   // coordinates failing a condition
};

// Least-angle regression with the lasso modification on the system
// ||K alpha - y||^2 + delta sum|alpha_i|, treating the columns of K as
// predictors. Runs until the active set would exceed max_active or all
// correlations reach zero (the endpoint then equals K^{-1} y).
LarsPath lars_path(const GramMatrix& g, std::span<const double> y, std::size_t max_active);

// Picks the path solution whose nonzero count is n - round(level * n); if
// that cardinality was skipped, returns the nearest smaller one and flags it.
SparsitySelection select_by_sparsity(const LarsPath& path, SparsityTarget target, std::size_t n);

// ||K alpha - y||^2 + delta sum|alpha_i|
double lasso_objective(const GramMatrix& g, std::span<const double> y,
                       std::span<const double> alpha, double delta);

// Stationarity certificate: |2 K_j^T(K alpha - y)| <= delta + tol everywhere
// and equality with sign -sign(alpha_j) on the support.
KktReport kkt_check(const GramMatrix& g, std::span<const double> y,
                    std::span<const double> alpha, double delta, double tol);

// Lasso solution at an arbitrary penalty, by exact linear interpolation
// between breakpoints (the path is piecewise linear in the correlation).
std::vector<double> path_solution_at_delta(const LarsPath& path, double delta);

}  // namespace ocksr
