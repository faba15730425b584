#include "ocksr/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocksr/kernels.hpp"
#include "ocksr/linalg.hpp"

namespace ocksr {

namespace {

constexpr double kTieRel = 1e-10;  // relative window for coincident events

struct ActiveSystem {
    std::vector<std::size_t> idx;    // ascending
    std::vector<double> sign;        // matching idx
    CholeskyFactor factor;           // of (K^2) restricted to idx
    std::vector<double> direction;   // d_A with G_A d_A = sign
    std::vector<double> base;        // G_A^{-1} (K y)_A
};

// Factors the active-set normal matrix and solves for the equiangular
// direction and the zero-penalty base point.
ActiveSystem build_active_system(const SymMatrix& k, std::span<const double> y,
                                 std::vector<std::size_t> idx, std::vector<double> sign) {
    const std::size_t m = idx.size();
    const std::size_t n = k.size();
    SymMatrix gram_a(m);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p; q < m; ++q)
            gram_a.set(p, q, kernels::dot(k.row(idx[p]), k.row(idx[q]), n));

    ActiveSystem sys;
    try {
        sys.factor = cholesky_decompose(gram_a);
    } catch (const NotPositiveDefinite& e) {
        throw NumericalBreakdown(std::string("active-set system is singular: ") + e.what(),
                                 idx);
    }
    std::vector<double> ky(m);
    for (std::size_t p = 0; p < m; ++p) ky[p] = kernels::dot(k.row(idx[p]), y.data(), n);
    sys.direction = solve_spd(sys.factor, sign);
    sys.base = solve_spd(sys.factor, ky);
    sys.idx = std::move(idx);
    sys.sign = std::move(sign);
    return sys;
}

// alpha_A(C) = base - C * direction, scattered into a full-length vector.
std::vector<double> alpha_at(const ActiveSystem& sys, double c, std::size_t n) {
    std::vector<double> alpha(n, 0.0);
    for (std::size_t p = 0; p < sys.idx.size(); ++p)
        alpha[sys.idx[p]] = sys.base[p] - c * sys.direction[p];
    return alpha;
}

}  // namespace

LarsPath lars_path(const GramMatrix& g, std::span<const double> y, std::size_t max_active) {
    const SymMatrix& k = g.matrix;
    const std::size_t n = k.size();
    if (y.size() != n) throw DimensionMismatch("label vector length mismatch");
    if (max_active < 1 || max_active > n)
        throw DomainError("max_active must be in [1, n]");
    // Reject non-PD systems up front; the path endpoint K^{-1} y needs it.
    (void)cholesky_decompose(k);

    LarsPath path;
    path.n = n;

    std::vector<double> alpha(n, 0.0);
    std::vector<double> corr(n);
    for (std::size_t j = 0; j < n; ++j) corr[j] = kernels::dot(k.row(j), y.data(), n);
    double cmax = norm_inf(corr);

    path.breakpoints.push_back({{}, alpha, cmax});
    if (cmax == 0.0) return path;

    const double gamma_tol = 1e-12 * std::max(cmax, 1.0);
    std::vector<char> in_active(n, 0);
    std::vector<std::size_t> active;
    std::vector<double> sign;

    // initial join: all coordinates tied at the top correlation
    for (std::size_t j = 0; j < n; ++j) {
        if (std::fabs(corr[j]) >= cmax * (1.0 - kTieRel)) {
            in_active[j] = 1;
            active.push_back(j);
            sign.push_back(corr[j] >= 0.0 ? 1.0 : -1.0);
        }
    }
    if (active.size() > max_active) return path;

    const std::size_t segment_cap = 8 * n + 16;
    bool completed = false;
    for (std::size_t segment = 0; segment < segment_cap; ++segment) {
        ActiveSystem sys = build_active_system(k, y, active, sign);

        // correlations and their decay rates under the current direction
        std::vector<double> resid(n);
        const std::vector<double> kalpha = sym_matvec(k, alpha);
        for (std::size_t j = 0; j < n; ++j) resid[j] = y[j] - kalpha[j];
        for (std::size_t j = 0; j < n; ++j) corr[j] = kernels::dot(k.row(j), resid.data(), n);
        cmax = norm_inf(corr);  // re-anchor against drift across segments

        std::vector<double> u(n, 0.0);
        for (std::size_t p = 0; p < sys.idx.size(); ++p)
            kernels::axpy(sys.direction[p], k.row(sys.idx[p]), u.data(), n);
        const std::vector<double> rate = sym_matvec(k, u);  // d|c_j|/dgamma for actives is 1

        double gamma_best = cmax;  // reaching zero correlation ends the path
        for (std::size_t j = 0; j < n; ++j) {
            if (in_active[j]) continue;
            for (const double t : {(cmax - corr[j]) / (1.0 - rate[j]),
                                   (cmax + corr[j]) / (1.0 + rate[j])}) {
                if (std::isfinite(t) && t > gamma_tol && t < gamma_best) gamma_best = t;
            }
        }
        for (std::size_t p = 0; p < sys.idx.size(); ++p) {
            if (sys.direction[p] == 0.0) continue;
            const double cur = sys.base[p] - cmax * sys.direction[p];
            const double t = -cur / sys.direction[p];  // alpha_p(cmax - t) == 0
            if (t > gamma_tol && t < gamma_best) gamma_best = t;
        }

        const double tie_window = gamma_best * (1.0 + kTieRel) + gamma_tol;
        const bool finishes = gamma_best >= cmax * (1.0 - kTieRel);
        const double cnext = finishes ? 0.0 : cmax - gamma_best;

        // collect events landing on the chosen step
        std::vector<std::size_t> joiners;
        std::vector<std::size_t> droppers;
        if (!finishes) {
            for (std::size_t j = 0; j < n; ++j) {
                if (in_active[j]) continue;
                for (const double t : {(cmax - corr[j]) / (1.0 - rate[j]),
                                       (cmax + corr[j]) / (1.0 + rate[j])}) {
                    if (std::isfinite(t) && t > gamma_tol && t <= tie_window) {
                        joiners.push_back(j);
                        break;
                    }
                }
            }
            for (std::size_t p = 0; p < sys.idx.size(); ++p) {
                if (sys.direction[p] == 0.0) continue;
                const double cur = sys.base[p] - cmax * sys.direction[p];
                const double t = -cur / sys.direction[p];
                if (t > gamma_tol && t <= tie_window) droppers.push_back(sys.idx[p]);
            }
        }

        alpha = alpha_at(sys, cnext, n);
        for (const std::size_t j : droppers) {
            alpha[j] = 0.0;
            in_active[j] = 0;
        }
        if (!droppers.empty()) {
            std::vector<std::size_t> kept;
            std::vector<double> kept_sign;
            for (std::size_t p = 0; p < active.size(); ++p) {
                if (in_active[active[p]]) {
                    kept.push_back(active[p]);
                    kept_sign.push_back(sign[p]);
                }
            }
            active = std::move(kept);
            sign = std::move(kept_sign);
        }

        path.breakpoints.push_back({active, alpha, cnext});
        if (finishes) {
            completed = true;
            break;
        }
        cmax = cnext;

        if (active.size() + joiners.size() > max_active) {
            completed = true;  // the path legitimately ends at the cardinality cap
            break;
        }
        if (joiners.empty() && droppers.empty())
            throw NumericalBreakdown("LARS step produced no event", active);
        for (const std::size_t j : joiners) {
            // sign taken from the correlation at the boundary
            const double cj = corr[j] - gamma_best * rate[j];
            in_active[j] = 1;
            active.push_back(j);
            sign.push_back(cj >= 0.0 ? 1.0 : -1.0);
        }
        // keep active/sign sorted by index
        std::vector<std::size_t> order(active.size());
        for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return active[a] < active[b]; });
        std::vector<std::size_t> sorted_active(active.size());
        std::vector<double> sorted_sign(active.size());
        for (std::size_t p = 0; p < order.size(); ++p) {
            sorted_active[p] = active[order[p]];
            sorted_sign[p] = sign[order[p]];
        }
        active = std::move(sorted_active);
        sign = std::move(sorted_sign);
    }
    if (!completed) throw NumericalBreakdown("LARS segment budget exhausted", active);
    return path;
}

SparsitySelection select_by_sparsity(const LarsPath& path, SparsityTarget target,
                                     std::size_t n) {
    if (path.breakpoints.empty()) throw EmptyPath("LARS path has no breakpoints");
    if (!(target.level >= 0.0) || target.level >= 1.0)
        throw DomainError("sparsity level must be in [0, 1)");
    const std::size_t wanted =
        n - static_cast<std::size_t>(std::llround(target.level * static_cast<double>(n)));

    const LarsBreakpoint* exact = nullptr;
    const LarsBreakpoint* below = nullptr;
    for (const LarsBreakpoint& bp : path.breakpoints) {
        const std::size_t card = bp.active.size();
        if (card == wanted) exact = &bp;  // last occurrence wins (smallest penalty)
        if (card < wanted && (below == nullptr || card >= below->active.size())) below = &bp;
    }
    const LarsBreakpoint* chosen = exact != nullptr ? exact : below;
    SparsitySelection sel;
    sel.coeffs = Coefficients{chosen->alpha, false};
    sel.implied_delta = 2.0 * chosen->correlation;
    sel.cardinality_flagged = (exact == nullptr);
    return sel;
}

double lasso_objective(const GramMatrix& g, std::span<const double> y,
                       std::span<const double> alpha, double delta) {
    const std::size_t n = g.size();
    if (y.size() != n || alpha.size() != n)
        throw DimensionMismatch("objective operands differ in length");
    if (!(delta >= 0.0)) throw DomainError("penalty must be non-negative");
    const std::vector<double> kalpha = sym_matvec(g.matrix, alpha);
    double fit = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = kalpha[i] - y[i];
        fit += r * r;
        l1 += std::fabs(alpha[i]);
    }
    return fit + delta * l1;
}

KktReport kkt_check(const GramMatrix& g, std::span<const double> y,
                    std::span<const double> alpha, double delta, double tol) {
    const std::size_t n = g.size();
    if (y.size() != n || alpha.size() != n)
        throw DimensionMismatch("KKT operands differ in length");
    if (!(delta > 0.0)) throw DomainError("KKT certificate requires delta > 0");

    KktReport report;
    report.gradient.resize(n);
    const std::vector<double> kalpha = sym_matvec(g.matrix, alpha);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = kalpha[i] - y[i];
    for (std::size_t j = 0; j < n; ++j) {
        const double grad = 2.0 * kernels::dot(g.matrix.row(j), resid.data(), n);
        report.gradient[j] = grad;
        bool ok = std::fabs(grad) <= delta + tol;
        if (ok && alpha[j] != 0.0) {
            const double s = alpha[j] > 0.0 ? 1.0 : -1.0;
            ok = std::fabs(grad + s * delta) <= tol;
        }
        if (!ok) report.violations.push_back(j);
    }
    report.pass = report.violations.empty();
    return report;
}

std::vector<double> path_solution_at_delta(const LarsPath& path, double delta) {
    if (path.breakpoints.empty()) throw EmptyPath("LARS path has no breakpoints");
    if (!(delta >= 0.0)) throw DomainError("penalty must be non-negative");
    const double c_query = delta / 2.0;
    const auto& bps = path.breakpoints;
    if (c_query >= bps.front().correlation) return bps.front().alpha;
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
        const double c0 = bps[k].correlation;
        const double c1 = bps[k + 1].correlation;
        if (c_query <= c0 && c_query >= c1) {
            const double span = c0 - c1;
            if (span <= 0.0) return bps[k + 1].alpha;
            const double t = (c0 - c_query) / span;
            std::vector<double> out(bps[k].alpha.size());
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = bps[k].alpha[i] + t * (bps[k + 1].alpha[i] - bps[k].alpha[i]);
            return out;
        }
    }
    return bps.back().alpha;
}

}  // namespace ocksr
