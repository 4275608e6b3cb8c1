// NEON variants of the reduction kernels for aarch64. Same contract as the
// AVX2 file: bit-identical to the scalar reference.

#include "kernels_detail.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "edgewatt/kernels.hpp"

namespace edgewatt::kernels::detail {
namespace {

double neon_extract_pass(double* xs, std::size_t n, double sigma) {
    const float64x2_t vsigma = vdupq_n_f64(sigma);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t x = vld1q_f64(xs + i);
        float64x2_t q = vsubq_f64(vaddq_f64(x, vsigma), vsigma);
        vst1q_f64(xs + i, vsubq_f64(x, q));
        acc = vaddq_f64(acc, q);
    }
    double hi_sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) {
        double x = xs[i];
        double q = (x + sigma) - sigma;
        xs[i] = x - q;
        hi_sum += q;
    }
    return hi_sum;
}

double neon_max_abs(const double* xs, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vm = vmaxq_f64(vm, vabsq_f64(vld1q_f64(xs + i)));
    }
    double m = std::max(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i) {
        m = std::max(m, std::fabs(xs[i]));
    }
    return m;
}

std::size_t neon_first_invalid(const double* xs, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t top = vdupq_n_f64(DBL_MAX);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t x = vld1q_f64(xs + i);
        uint64x2_t ok = vandq_u64(vcgeq_f64(x, zero), vcleq_f64(x, top));
        if (vgetq_lane_u64(ok, 0) == 0) {
            return i;
        }
        if (vgetq_lane_u64(ok, 1) == 0) {
            return i + 1;
        }
    }
    for (; i < n; ++i) {
        double x = xs[i];
        if (!(x >= 0.0) || x > DBL_MAX) {
            return i;
        }
    }
    return npos;
}

}  // namespace

const KernelOps neon_ops{neon_extract_pass, neon_max_abs, neon_first_invalid};

}  // namespace edgewatt::kernels::detail

#endif  // aarch64
