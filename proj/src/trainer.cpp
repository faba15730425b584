#include "ocksr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ocksr/kernels.hpp"
#include "ocksr/linalg.hpp"

namespace ocksr {

namespace {

double tikhonov_objective(const SymMatrix& k, std::span<const double> alpha,
                          std::span<const double> y, double delta) {
    const std::vector<double> kalpha = sym_matvec(k, alpha);
    double fit = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = kalpha[i] - y[i];
        fit += r * r;
    }
    return fit + delta * kernels::dot(alpha.data(), kalpha.data(), alpha.size());
}

struct ResolvedRidge {
    double delta = 0.0;
    bool floored = false;
    GramMatrix gram;  // the matrix the solve runs on
};

ResolvedRidge resolve_ridge(const GramMatrix& g, const RidgeConfig& cfg) {
    ResolvedRidge out;
    switch (cfg.delta_mode) {
        case DeltaMode::explicit_value: {
            if (!(cfg.delta >= 0.0) || !std::isfinite(cfg.delta))
                throw DomainError("explicit delta must be finite and non-negative");
            out.delta = cfg.delta;
            out.gram = g;
            break;
        }
        case DeltaMode::optimal_general: {
            const EigenSummary es = extreme_eigenvalues(g.matrix);
            const DeltaChoice c = delta_opt_general(es, cfg.delta_floor);
            out.delta = c.delta;
            out.floored = c.floored;
            out.gram = g;
            break;
        }
        case DeltaMode::optimal_normalized: {
            const EigenSummary es = extreme_eigenvalues(g.matrix);
            if (!(es.lambda_min > 0.0))
                throw InvalidSpectrum("kernel matrix is not positive definite");
            const DeltaChoice c =
                delta_opt_normalized(es.lambda_min / es.lambda_max, cfg.delta_floor);
            out.delta = c.delta;
            out.floored = c.floored;
            out.gram = g;
            out.gram.matrix = g.matrix.scaled(1.0 / es.lambda_max);
            out.gram.spectral_scale = g.spectral_scale / es.lambda_max;
            break;
        }
    }
    return out;
}

void add_flag(std::vector<std::string>& flags, const std::string& flag) {
    if (std::find(flags.begin(), flags.end(), flag) == flags.end()) flags.push_back(flag);
}

double delta_norm(std::span<const double> a, std::span<const double> b) {
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return norm2(diff);
}

// One sweep shared by all variants: solve, normalise, update labels, record.
// `solve` returns the raw minimiser at the current labels together with the
// penalty in force; `relabel` maps responses to the next label vector.
template <typename SolveFn, typename RelabelFn>
FitResult run_alternation(const GramMatrix& gram, std::vector<double> y, const StopRule& stop,
                          SolveFn&& solve, RelabelFn&& relabel, FitReport report) {
    const std::size_t n = gram.size();
    if (y.size() != n) throw DimensionMismatch("initial labels length mismatch");
    if (!(stop.tol > 0.0) || stop.max_iter < 1) throw DomainError("invalid stop rule");

    const SymMatrix& k = gram.matrix;
    std::vector<double> alpha_prev(n, 0.0);
    std::vector<double> alpha_hat;

    auto objective = [&](std::span<const double> a, std::span<const double> labels,
                         double delta, bool l1) {
        return l1 ? lasso_objective(gram, labels, a, delta)
                  : tikhonov_objective(k, a, labels, delta);
    };

    for (std::size_t iter = 1; iter <= stop.max_iter; ++iter) {
        auto [raw, delta, l1] = solve(y, report);
        DescentAudit audit;
        audit.before = objective(alpha_prev, y, delta, l1);
        audit.at_solution = objective(raw, y, delta, l1);

        const double raw_norm = norm2(raw);
        if (raw_norm <= 1e-300)
            throw ZeroVector("regularised solution vanished; labels are degenerate");
        alpha_hat = raw;
        for (double& v : alpha_hat) v /= raw_norm;
        audit.normalized = objective(alpha_hat, y, delta, l1);

        const std::vector<double> responses = sym_matvec(k, alpha_hat);
        std::vector<double> y_next = relabel(responses);
        audit.updated = objective(alpha_hat, y_next, delta, l1);

        const double err = delta_norm(alpha_hat, alpha_prev);
        report.iterations = iter;
        report.error_trace.push_back(err);
        report.objective_trace.push_back(audit.updated);
        report.descent_audit.push_back(audit);
        report.delta_used = delta;

        alpha_prev = alpha_hat;
        y = std::move(y_next);
        if (err <= stop.tol) {
            report.converged = true;
            break;
        }
        if (!relabel.keep_going(y, report)) {
            report.converged = true;
            break;
        }
    }

    FitResult result;
    result.alpha = Coefficients{std::move(alpha_hat), true};
    result.labels = ResponseVector{std::move(y)};
    result.report = std::move(report);
    result.working_gram = gram;
    return result;
}

struct SoftRelabel {
    std::vector<double> operator()(const std::vector<double>& responses) const {
        return responses;
    }
    bool keep_going(const std::vector<double>&, FitReport&) const { return true; }
};

struct SrRelabel {
    std::size_t n0;
    std::vector<std::vector<double>> seen;

    std::vector<double> operator()(const std::vector<double>& responses) {
        return sr_update(responses, n0).y;
    }

    // Binary labels can cycle without the coefficient error ever reaching the
    // tolerance; a repeat of an earlier (non-adjacent) label vector ends the
    // loop.
    bool keep_going(const std::vector<double>& y, FitReport& report) {
        const bool repeat = std::find(seen.begin(), seen.end(), y) != seen.end();
        if (!seen.empty() && y == seen.back()) {
            seen.push_back(y);
            return true;  // stationary labels converge through the error test
        }
        seen.push_back(y);
        if (repeat) add_flag(report.substitution_flags, "label_cycle");
        return !repeat;
    }
};

}  // namespace

ResponseVector init_labels(std::size_t n, std::size_t n_neg) {
    if (n == 0 || n_neg >= n)
        throw InvalidCounts("need 0 <= n_neg < n");
    std::vector<double> y(n, 1.0);
    std::fill(y.begin() + static_cast<std::ptrdiff_t>(n - n_neg), y.end(), 0.0);
    return ResponseVector{std::move(y)};
}

ResponseVector update_labels(const GramMatrix& g, const Coefficients& alpha) {
    return ResponseVector{sym_matvec(g.matrix, alpha.alpha)};
}

ResponseVector sr_update(std::span<const double> responses, std::size_t n0) {
    const std::size_t n = responses.size();
    if (n0 > n) throw InvalidCounts("n0 exceeds the number of responses");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (responses[a] != responses[b]) return responses[a] < responses[b];
        return a < b;
    });
    std::vector<double> y(n, 1.0);
    for (std::size_t i = 0; i < n0; ++i) y[order[i]] = 0.0;
    return ResponseVector{std::move(y)};
}

FitResult alternate_fit_tikhonov(const GramMatrix& g, const ResponseVector& y0,
                                 const RidgeConfig& cfg, const StopRule& stop) {
    const ResolvedRidge r = resolve_ridge(g, cfg);
    FitReport report;
    if (r.floored) add_flag(report.substitution_flags, "delta_floor");

    auto solve = [&](const std::vector<double>& y, FitReport&) {
        return std::tuple<std::vector<double>, double, bool>(
            ridge_step(r.gram, y, r.delta).alpha, r.delta, false);
    };
    return run_alternation(r.gram, y0.y, stop, solve, SoftRelabel{}, std::move(report));
}

FitResult alternate_fit_lasso(const GramMatrix& g, const ResponseVector& y0,
                              SparsityTarget target, const StopRule& stop) {
    const std::size_t n = g.size();
    const std::size_t wanted =
        n - static_cast<std::size_t>(std::llround(target.level * static_cast<double>(n)));
    const std::size_t max_active = std::clamp<std::size_t>(wanted, 1, n);

    auto solve = [&](const std::vector<double>& y, FitReport& report) {
        const LarsPath path = lars_path(g, y, max_active);
        const SparsitySelection sel = select_by_sparsity(path, target, n);
        if (sel.cardinality_flagged)
            add_flag(report.substitution_flags, "skipped_cardinality");
        return std::tuple<std::vector<double>, double, bool>(sel.coeffs.alpha,
                                                             sel.implied_delta, true);
    };
    return run_alternation(g, y0.y, stop, solve, SoftRelabel{}, FitReport{});
}

FitResult alternate_fit_known_fraction(const GramMatrix& g, std::size_t n0,
                                       const std::variant<RidgeConfig, SparsityTarget>& reg,
                                       const StopRule& stop) {
    const std::size_t n = g.size();
    if (n0 >= n) throw InvalidCounts("known contamination count must be below n");
    const ResponseVector y0 = init_labels(n, 0);

    FitResult result;
    if (std::holds_alternative<RidgeConfig>(reg)) {
        const ResolvedRidge r = resolve_ridge(g, std::get<RidgeConfig>(reg));
        FitReport report;
        if (r.floored) add_flag(report.substitution_flags, "delta_floor");
        auto solve = [&](const std::vector<double>& y, FitReport&) {
            return std::tuple<std::vector<double>, double, bool>(
                ridge_step(r.gram, y, r.delta).alpha, r.delta, false);
        };
        result = run_alternation(r.gram, y0.y, stop, solve, SrRelabel{n0, {}},
                                 std::move(report));
    } else {
        const SparsityTarget target = std::get<SparsityTarget>(reg);
        const std::size_t wanted =
            n - static_cast<std::size_t>(std::llround(target.level * static_cast<double>(n)));
        const std::size_t max_active = std::clamp<std::size_t>(wanted, 1, n);
        auto solve = [&](const std::vector<double>& y, FitReport& report) {
            const LarsPath path = lars_path(g, y, max_active);
            const SparsitySelection sel = select_by_sparsity(path, target, n);
            if (sel.cardinality_flagged)
                add_flag(report.substitution_flags, "skipped_cardinality");
            return std::tuple<std::vector<double>, double, bool>(sel.coeffs.alpha,
                                                                 sel.implied_delta, true);
        };
        result = run_alternation(g, y0.y, stop, solve, SrRelabel{n0, {}}, FitReport{});
    }
    return result;
}

}  // namespace ocksr
