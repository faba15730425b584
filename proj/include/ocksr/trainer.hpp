#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ocksr/kernel.hpp"
#include "ocksr/lasso.hpp"
#include "ocksr/ridge.hpp"

namespace ocksr {

// Soft labels / responses, refined across iterations.
struct ResponseVector {
    std::vector<double> y;
};

struct StopRule {
    double tol = 1e-6;        // on ||alpha_{t+1} - alpha_t||_2
    std::size_t max_iter = 100;
};

// Objective values bracketing one iteration, recorded so the two per-step
// descent inequalities of the alternating scheme can be audited from the
// report alone. `at_solution` uses the raw (pre-normalisation) minimiser.
struct DescentAudit {
    double before = 0.0;       // P(alpha_t, y_t)
    double at_solution = 0.0;  // P(raw minimiser, y_t)
    double normalized = 0.0;   // P(alpha_{t+1}, y_t)
    double updated = 0.0;      // P(alpha_{t+1}, y_{t+1})
};

struct FitReport {
    std::size_t iterations = 0;
    std::vector<double> error_trace;      // per-iteration ||delta alpha||_2
    std::vector<double> objective_trace;  // per-iteration P(alpha, y), active regulariser
    std::vector<DescentAudit> descent_audit;
    double delta_used = 0.0;  // resolved ridge delta, or last implied lasso penalty
    bool converged = false;
    std::vector<std::string> substitution_flags;  // e.g. delta_floor, skipped_cardinality
};

struct FitResult {
    Coefficients alpha;     // unit norm
    ResponseVector labels;  // final responses (binary for the known-fraction variant)
    FitReport report;
    GramMatrix working_gram;  // the (possibly spectrally rescaled) matrix the fit ran on
};

// First n - n_neg entries one, the rest zero. n_neg = 0 is the unsupervised
// all-ones start.
ResponseVector init_labels(std::size_t n, std::size_t n_neg);

// y = K alpha (the exact label update of the alternating scheme).
ResponseVector update_labels(const GramMatrix& g, const Coefficients& alpha);

// Alternating minimisation with ridge regularisation:
// repeat { alpha = (K + delta I)^{-1} y; alpha /= ||alpha||; y = K alpha }.
// With delta_mode = optimal_normalized the fit runs on the spectrally
// rescaled matrix.
FitResult alternate_fit_tikhonov(const GramMatrix& g, const ResponseVector& y0,
                                 const RidgeConfig& cfg, const StopRule& stop);

// Same loop with the l1-penalised solve: each iteration takes the LARS path
// solution at the requested support cardinality.
FitResult alternate_fit_lasso(const GramMatrix& g, const ResponseVector& y0,
                              SparsityTarget target, const StopRule& stop);

// Binary labels with the n0 smallest responses zeroed; ties zero the smaller
// index first.
ResponseVector sr_update(std::span<const double> responses, std::size_t n0);

// The known-contamination-count variant: labels are re-binarised through
// sr_update after every coefficient update; the final zero set identifies the
// counter-examples.
FitResult alternate_fit_known_fraction(const GramMatrix& g, std::size_t n0,
                                       const std::variant<RidgeConfig, SparsityTarget>& reg,
                                       const StopRule& stop);

}  // namespace ocksr
