#pragma once

#include <cstddef>

// Data-parallel inner loops used by the dense linear algebra and kernel
// evaluation code. A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. Set
// OCKSR_KERNELS=scalar (or =avx2) in the environment to force a backend.
//
// The variants are equivalence-tested against each other; they may differ in
// accumulation order, so results agree to rounding, not bitwise.

namespace ocksr::kernels {

struct Ops {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sqdist)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

// Scalar reference kernels (always available).
const Ops& scalar_ops();

// AVX2 kernels, or nullptr if not compiled in / not supported by this CPU.
const Ops* avx2_ops();

// Backend chosen once per process.
const Ops& active();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}

inline double sqdist(const double* a, const double* b, std::size_t n) {
    return active().sqdist(a, b, n);
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}

}  // namespace ocksr::kernels
