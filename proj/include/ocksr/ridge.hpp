#pragma once

#include <span>
#include <vector>

#include "ocksr/kernel.hpp"
#include "ocksr/linalg.hpp"

namespace ocksr {

enum class DeltaMode {
    explicit_value,     // use RidgeConfig::delta as given
    optimal_general,    // sensitivity-optimal delta from the raw spectrum
    optimal_normalized  // sensitivity-optimal delta after unit spectral norm
};

struct RidgeConfig {
    double delta = 0.0;
    DeltaMode delta_mode = DeltaMode::optimal_normalized;
    double delta_floor = 1e-8;  // substituted when a computed optimum is <= 0
};

// Kernel expansion weights. unit_norm marks vectors already scaled to
// ||alpha||_2 = 1.
struct Coefficients {
    std::vector<double> alpha;
    bool unit_norm = false;
};

struct DeltaChoice {
    double delta = 0.0;
    bool floored = false;  // the formula produced <= 0 (or NaN) and the floor was used
};

// Solves (K + delta I) alpha = y. The solution is returned raw; callers
// normalise where their algorithm requires it.
Coefficients ridge_step(const GramMatrix& g, std::span<const double> y, double delta);

// Sensitivity-optimal regularisation weight from the spectrum of K:
// lambda_min (c - (c+1)/(2 sqrt c)) / ((c+1)/(2 sqrt c) - 1).
DeltaChoice delta_opt_general(const EigenSummary& es, double delta_floor = 1e-8);

// The same optimum for a kernel matrix with unit spectral norm:
// 1/(1 + lambda_min) - lambda_min (2 - sqrt(lambda_min)) / 2.
DeltaChoice delta_opt_normalized(double lambda_min, double delta_floor = 1e-8);

// Relative change of the solution under a label perturbation:
// ||alpha' - alpha|| / ||alpha'||.
double sensitivity(const Coefficients& alpha_prime, const Coefficients& alpha);

// The unregularised baseline: alpha = K^{-1} y with fixed labels, no
// iteration, no normalisation.
Coefficients fit_ocksr_baseline(const GramMatrix& g, std::span<const double> y);

}  // namespace ocksr
