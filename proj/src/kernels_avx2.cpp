// AVX2 variants of the reduction kernels. Compiled with -mavx2; only
// dispatched to after a runtime cpuid check. Results are bit-identical to
// the scalar reference: extraction additions are exact by construction, and
// max/scan kernels are order-independent on finite data.

#include "kernels_detail.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "edgewatt/kernels.hpp"

namespace edgewatt::kernels::detail {
namespace {

double avx2_extract_pass(double* xs, std::size_t n, double sigma) {
    const __m256d vsigma = _mm256_set1_pd(sigma);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(xs + i);
        __m256d q = _mm256_sub_pd(_mm256_add_pd(x, vsigma), vsigma);
        _mm256_storeu_pd(xs + i, _mm256_sub_pd(x, q));
        acc = _mm256_add_pd(acc, q);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double hi_sum = ((lane[0] + lane[1]) + lane[2]) + lane[3];
    for (; i < n; ++i) {
        double x = xs[i];
        double q = (x + sigma) - sigma;
        xs[i] = x - q;
        hi_sum += q;
    }
    return hi_sum;
}

double avx2_max_abs(const double* xs, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_andnot_pd(sign, _mm256_loadu_pd(xs + i));
        vm = _mm256_max_pd(vm, x);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, vm);
    double m = std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
    for (; i < n; ++i) {
        m = std::max(m, std::fabs(xs[i]));
    }
    return m;
}

std::size_t avx2_first_invalid(const double* xs, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d top = _mm256_set1_pd(DBL_MAX);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(xs + i);
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(x, zero, _CMP_GE_OQ),
                                   _mm256_cmp_pd(x, top, _CMP_LE_OQ));
        int mask = _mm256_movemask_pd(ok);
        if (mask != 0xF) {
            for (int lane = 0; lane < 4; ++lane) {
                if (((mask >> lane) & 1) == 0) {
                    return i + static_cast<std::size_t>(lane);
                }
            }
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

const KernelOps avx2_ops{avx2_extract_pass, avx2_max_abs, avx2_first_invalid};

}  // namespace edgewatt::kernels::detail

#endif  // x86-64
