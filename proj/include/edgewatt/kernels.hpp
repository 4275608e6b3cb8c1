#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace edgewatt::kernels {

// Reduction kernels over power-sample arrays. Every kernel has a scalar
// reference implementation plus SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at startup from CPU capabilities. All variants
// return bit-identical results: the summation is built from error-free
// extraction passes whose additions never round, so lane count and
// association order cannot change the outcome.

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend backend);

// Variants compiled in and usable on this CPU. scalar is always first.
const std::vector<Backend>& available_backends();

Backend active_backend();

// Throws ValidationError if the backend is not available. Intended for
// equivalence tests and the EDGEWATT_KERNEL_BACKEND escape hatch.
void set_backend(Backend backend);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Correctly rounded value of the exact (infinite-precision) sum. The result
// is invariant under permutation of the input and identical across backends.
// Inputs must be finite; throws ValidationError otherwise.
double sum_exact(std::span<const double> xs);

// Largest absolute value, 0 for an empty span.
double max_abs(std::span<const double> xs);

// Index of the first sample that is negative or not finite, npos if none.
std::size_t first_invalid_sample(std::span<const double> xs);

}  // namespace edgewatt::kernels
