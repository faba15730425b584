#include "ocksr/ridge.hpp"

#include <cmath>

namespace ocksr {

Coefficients ridge_step(const GramMatrix& g, std::span<const double> y, double delta) {
    if (y.size() != g.size()) throw DimensionMismatch("label vector length mismatch");
    if (!(delta >= 0.0)) throw DomainError("ridge delta must be non-negative");
    const SymMatrix regularized = g.matrix.plus_diagonal(delta);
    return Coefficients{solve_spd(cholesky_decompose(regularized), y), false};
}

DeltaChoice delta_opt_general(const EigenSummary& es, double delta_floor) {
    if (!(es.lambda_min > 0.0))
        throw InvalidSpectrum("optimal delta requires a positive definite spectrum");
    const double c = es.condition;
    const double half_ratio = (c + 1.0) / (2.0 * std::sqrt(c));
    const double value = es.lambda_min * (c - half_ratio) / (half_ratio - 1.0);
    if (!std::isfinite(value) || value <= 0.0) return {delta_floor, true};
    return {value, false};
}

DeltaChoice delta_opt_normalized(double lambda_min, double delta_floor) {
    if (!(lambda_min > 0.0) || lambda_min > 1.0)
        throw InvalidSpectrum("normalised optimal delta requires lambda_min in (0, 1]");
    const double value =
        1.0 / (1.0 + lambda_min) - lambda_min * (2.0 - std::sqrt(lambda_min)) / 2.0;
    if (!std::isfinite(value) || value <= 0.0) return {delta_floor, true};
    return {value, false};
}

double sensitivity(const Coefficients& alpha_prime, const Coefficients& alpha) {
    if (alpha_prime.alpha.size() != alpha.alpha.size())
        throw DimensionMismatch("coefficient vectors differ in length");
    const double denom = norm2(alpha_prime.alpha);
    if (denom <= 1e-300) throw ZeroVector("perturbed solution has zero norm");
    std::vector<double> diff(alpha.alpha.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = alpha_prime.alpha[i] - alpha.alpha[i];
    return norm2(diff) / denom;
}

Coefficients fit_ocksr_baseline(const GramMatrix& g, std::span<const double> y) {
    return ridge_step(g, y, 0.0);
}

}  // namespace ocksr
