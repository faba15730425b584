#include "ocksr/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ocksr::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

constexpr Ops kScalarOps{"scalar", dot_scalar, sqdist_scalar, axpy_scalar};

const Ops* select_backend() {
    const char* forced = std::getenv("OCKSR_KERNELS");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return &kScalarOps;
    const Ops* best = avx2_ops();
    if (forced != nullptr && std::strcmp(forced, "avx2") == 0 && best != nullptr) return best;
    if (forced != nullptr && std::strcmp(forced, "scalar") != 0 && best == nullptr)
        return &kScalarOps;
    return best != nullptr ? best : &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

#if !defined(OCKSR_HAVE_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& active() {
    static const Ops* chosen = select_backend();
    return *chosen;
}

}  // namespace ocksr::kernels
