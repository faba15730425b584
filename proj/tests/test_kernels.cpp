#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ocksr/kernels.hpp"
#include "ocksr/rng.hpp"

using namespace ocksr;

namespace {

double ref_sum_abs_products(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] * b[i]);
    return s;
}

}  // namespace

TEST_CASE("kernel backend dispatch picks a known implementation") {
    const std::string name = kernels::active().name;
    CHECK((name == "scalar" || name == "avx2"));
}

TEST_CASE("scalar and AVX2 kernels agree on random inputs") {
    const kernels::Ops* simd = kernels::avx2_ops();
    if (simd == nullptr) return;  // not an AVX2 machine
    const kernels::Ops& ref = kernels::scalar_ops();

    Rng rng(2024);
    for (const std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 33u, 100u, 1001u}) {
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 20.0 * rng.uniform01() - 10.0;
            b[i] = 20.0 * rng.uniform01() - 10.0;
        }
        const double scale = ref_sum_abs_products(a, b) + 1.0;

        CHECK(std::fabs(ref.dot(a.data(), b.data(), n) - simd->dot(a.data(), b.data(), n)) <=
              1e-13 * scale);
        CHECK(std::fabs(ref.sqdist(a.data(), b.data(), n) -
                        simd->sqdist(a.data(), b.data(), n)) <= 1e-13 * (scale + 100.0));

        std::vector<double> y_ref = b;
        std::vector<double> y_simd = b;
        ref.axpy(0.75, a.data(), y_ref.data(), n);
        simd->axpy(0.75, a.data(), y_simd.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y_ref[i] == y_simd[i]);
    }
}

TEST_CASE("kernels handle empty and single-element spans") {
    const double a = 3.0;
    const double b = -2.0;
    CHECK(kernels::dot(&a, &b, 0) == 0.0);
    CHECK(kernels::dot(&a, &b, 1) == -6.0);
    CHECK(kernels::sqdist(&a, &b, 1) == 25.0);
    double y = 1.0;
    kernels::axpy(2.0, &a, &y, 1);
    CHECK(y == 7.0);
}
