#pragma once

// Internal kernel vtable shared by the per-backend translation units.
// extract_pass is the workhorse of the exact sum: it splits every element
// against the power-of-two splitter sigma into a coarse "high" part and an
// error-free remainder, accumulates the high parts (all those additions are
// exact by construction of sigma) and leaves the remainders in place.

#include <cstddef>

namespace edgewatt::kernels::detail {

struct KernelOps {
    // xs[i] -> remainder; returns the sum of the extracted high parts.
    double (*extract_pass)(double* xs, std::size_t n, double sigma);
    double (*max_abs)(const double* xs, std::size_t n);
    std::size_t (*first_invalid)(const double* xs, std::size_t n);
};

extern const KernelOps scalar_ops;

#if defined(__x86_64__) || defined(_M_X64)
#define EDGEWATT_HAVE_AVX2_TU 1
extern const KernelOps avx2_ops;
#endif

#if defined(__aarch64__)
#define EDGEWATT_HAVE_NEON_TU 1
extern const KernelOps neon_ops;
#endif

}  // namespace edgewatt::kernels::detail
