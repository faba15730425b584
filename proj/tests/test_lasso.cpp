#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "ocksr/lasso.hpp"
#include "ocksr/linalg.hpp"
#include "ocksr/rng.hpp"
#include "oracles.hpp"

using namespace ocksr;

namespace {

GramMatrix wrap(SymMatrix m) {
    GramMatrix g;
    g.params = {1.0};
    g.matrix = std::move(m);
    return g;
}

GramMatrix scalar_system(double k) {
    SymMatrix m(1);
    m.set(0, 0, k);
    return wrap(std::move(m));
}

// RBF gram over random points: positive definite with probability one.
GramMatrix random_gram(std::size_t n, Rng& rng) {
    SampleMatrix x(n, 3);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 3; ++j) x.rows(i, j) = 4.0 * rng.uniform01() - 2.0;
    return gram_matrix(x, {1.2});
}

std::size_t support_size(const std::vector<double>& alpha) {
    std::size_t s = 0;
    for (const double a : alpha) s += (a != 0.0);
    return s;
}

}  // namespace

TEST_CASE("scalar system: endpoint and mid-path solution") {
    const GramMatrix g = scalar_system(2.0);
    const LarsPath path = lars_path(g, std::vector<double>{1.0}, 1);
    REQUIRE(path.breakpoints.size() == 2);
    CHECK(path.breakpoints.front().correlation == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(path.breakpoints.back().correlation == 0.0);
    CHECK(path.breakpoints.back().alpha[0] == doctest::Approx(0.5).epsilon(1e-12));

    // minimiser of (2a - 1)^2 + |a| is a = 3/8
    const std::vector<double> mid = path_solution_at_delta(path, 1.0);
    CHECK(mid[0] == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("lasso objective values") {
    const GramMatrix g = scalar_system(2.0);
    const std::vector<double> y{1.0};
    CHECK(lasso_objective(g, y, std::vector<double>{0.0}, 3.0) == 1.0);
    CHECK(lasso_objective(g, y, std::vector<double>{0.375}, 1.0) ==
          doctest::Approx(0.4375).epsilon(1e-15));

    GramMatrix eye = wrap(SymMatrix(2));
    eye.matrix.set(0, 0, 1.0);
    eye.matrix.set(1, 1, 1.0);
    const std::vector<double> v{0.3, -0.7};
    CHECK(lasso_objective(eye, v, v, 0.0) == 0.0);

    CHECK_THROWS_AS(lasso_objective(g, std::vector<double>{1.0, 2.0},
                                    std::vector<double>{0.0}, 1.0),
                    DimensionMismatch);
}

TEST_CASE("KKT certificate") {
    const GramMatrix g = scalar_system(2.0);
    const std::vector<double> y{1.0};
    CHECK(kkt_check(g, y, std::vector<double>{0.375}, 1.0, 1e-10).pass);

    // zero is optimal once delta dominates the initial correlations
    Rng rng(61);
    const GramMatrix h = random_gram(5, rng);
    const std::vector<double> y5 = oracles::random_vector(5, rng);
    double top = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < 5; ++i) c += h.matrix(i, j) * y5[i];
        top = std::max(top, std::fabs(c));
    }
    CHECK(kkt_check(h, y5, std::vector<double>(5, 0.0), 2.0 * top + 0.1, 1e-10).pass);

    // the unregularised solution is generically not lasso-optimal at delta 1
    const std::vector<double> exact = solve_spd(cholesky_decompose(h.matrix), y5);
    CHECK_FALSE(kkt_check(h, y5, exact, 1.0, 1e-6).pass);
}

TEST_CASE("path breakpoints are lasso solutions at their implied penalty") {
    Rng rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng.below(11);
        const GramMatrix g = random_gram(n, rng);
        const std::vector<double> y = oracles::random_vector(n, rng);
        const LarsPath path = lars_path(g, y, n);
        for (const LarsBreakpoint& bp : path.breakpoints) {
            CHECK(bp.active.size() == support_size(bp.alpha));
            if (bp.correlation <= 0.0) continue;
            CHECK(kkt_check(g, y, bp.alpha, 2.0 * bp.correlation, 1e-6).pass);
        }
        // correlations strictly decrease along the path
        for (std::size_t i = 1; i < path.breakpoints.size(); ++i)
            CHECK(path.breakpoints[i].correlation < path.breakpoints[i - 1].correlation);
    }
}

TEST_CASE("path endpoint equals the unregularised solve") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng.below(11);
        const GramMatrix g = random_gram(n, rng);
        const std::vector<double> y = oracles::random_vector(n, rng);
        const LarsPath path = lars_path(g, y, n);
        const std::vector<double> exact = solve_spd(cholesky_decompose(g.matrix), y);
        const std::vector<double>& end = path.breakpoints.back().alpha;
        double scale = 1.0;
        for (const double v : exact) scale = std::max(scale, std::fabs(v));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::fabs(end[i] - exact[i]) <= 1e-8 * scale);
    }
}

TEST_CASE("breakpoint objectives match the coordinate-descent oracle") {
    Rng rng(73);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 3 + rng.below(6);
        const GramMatrix g = random_gram(n, rng);
        const std::vector<double> y = oracles::random_vector(n, rng);
        const LarsPath path = lars_path(g, y, n);
        for (const LarsBreakpoint& bp : path.breakpoints) {
            if (bp.correlation <= 0.0) continue;
            const double delta = 2.0 * bp.correlation;
            const std::vector<double> ref = oracles::cd_lasso(g.matrix, y, delta);
            const double got = lasso_objective(g, y, bp.alpha, delta);
            const double want = lasso_objective(g, y, ref, delta);
            CHECK(std::fabs(got - want) <= 1e-6);
        }
    }
}

TEST_CASE("breakpoint objective never exceeds the zero solution's") {
    Rng rng(79);
    const GramMatrix g = random_gram(8, rng);
    const std::vector<double> y = oracles::random_vector(8, rng);
    const LarsPath path = lars_path(g, y, 8);
    const std::vector<double> zero(8, 0.0);
    for (const LarsBreakpoint& bp : path.breakpoints) {
        const double delta = 2.0 * bp.correlation;
        CHECK(lasso_objective(g, y, bp.alpha, delta) <=
              lasso_objective(g, y, zero, delta) + 1e-12);
    }
}

TEST_CASE("sparsity selection picks the requested cardinality") {
    Rng rng(83);
    const GramMatrix g = random_gram(10, rng);
    const std::vector<double> y = oracles::random_vector(10, rng);
    const LarsPath path = lars_path(g, y, 10);

    const SparsitySelection dense = select_by_sparsity(path, {0.0}, 10);
    CHECK_FALSE(dense.cardinality_flagged);
    CHECK(support_size(dense.coeffs.alpha) == 10);

    const SparsitySelection one = select_by_sparsity(path, {0.9}, 10);
    CHECK_FALSE(one.cardinality_flagged);
    CHECK(support_size(one.coeffs.alpha) == 1);
    CHECK(one.implied_delta > 0.0);

    CHECK_THROWS_AS(select_by_sparsity(LarsPath{}, {0.5}, 10), EmptyPath);
}

TEST_CASE("sparsity selection on a 100-sample system") {
    Rng rng(89);
    const GramMatrix g = random_gram(100, rng);
    const std::vector<double> y(100, 1.0);
    const LarsPath path = lars_path(g, y, 10);
    const SparsitySelection sel = select_by_sparsity(path, {0.9}, 100);
    if (!sel.cardinality_flagged) {
        CHECK(support_size(sel.coeffs.alpha) == 10);
        std::size_t zeros = 0;
        for (const double a : sel.coeffs.alpha) zeros += (a == 0.0);
        CHECK(zeros == 90);
    }
}

TEST_CASE("tied joins skip a cardinality and the selection flags it") {
    GramMatrix eye = wrap(SymMatrix(2));
    eye.matrix.set(0, 0, 1.0);
    eye.matrix.set(1, 1, 1.0);
    const LarsPath path = lars_path(eye, std::vector<double>{1.0, 1.0}, 2);
    REQUIRE(path.breakpoints.size() == 2);
    CHECK(path.breakpoints.back().active.size() == 2);
    CHECK(path.breakpoints.back().alpha[0] == doctest::Approx(1.0).epsilon(1e-12));

    const SparsitySelection sel = select_by_sparsity(path, {0.5}, 2);
    CHECK(sel.cardinality_flagged);
    CHECK(support_size(sel.coeffs.alpha) < 1);  // nearest smaller is the empty solution
}

TEST_CASE("max_active truncates the path") {
    Rng rng(97);
    const GramMatrix g = random_gram(12, rng);
    const std::vector<double> y = oracles::random_vector(12, rng);
    const LarsPath path = lars_path(g, y, 4);
    std::size_t largest = 0;
    for (const LarsBreakpoint& bp : path.breakpoints)
        largest = std::max(largest, bp.active.size());
    CHECK(largest <= 4);
    CHECK_THROWS_AS(lars_path(g, y, 0), DomainError);
    CHECK_THROWS_AS(lars_path(g, y, 13), DomainError);
}
