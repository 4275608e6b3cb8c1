#include "edgewatt/kernels.hpp"

#include <atomic>
#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <string>

#include "edgewatt/errors.hpp"
#include "kernels_detail.hpp"

namespace edgewatt::kernels {

namespace detail {
namespace {

double scalar_extract_pass(double* xs, std::size_t n, double sigma) {
    double hi_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = xs[i];
        double q = (x + sigma) - sigma;  // high part of x on the sigma grid
        xs[i] = x - q;                   // error-free remainder
        hi_sum += q;                     // exact: partial sums of q never round
    }
    return hi_sum;
}

double scalar_max_abs(const double* xs, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(xs[i]));
    }
    return m;
}

std::size_t scalar_first_invalid(const double* xs, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double x = xs[i];
        if (!(x >= 0.0) || x > DBL_MAX) {  // negatives, NaN, +inf
            return i;
        }
    }
    return npos;
}

}  // namespace

const KernelOps scalar_ops{scalar_extract_pass, scalar_max_abs, scalar_first_invalid};

}  // namespace detail

namespace {

const detail::KernelOps& ops_for(Backend backend) {
    switch (backend) {
#if defined(EDGEWATT_HAVE_AVX2_TU)
        case Backend::avx2:
            return detail::avx2_ops;
#endif
#if defined(EDGEWATT_HAVE_NEON_TU)
        case Backend::neon:
            return detail::neon_ops;
#endif
        default:
            return detail::scalar_ops;
    }
}

std::vector<Backend> detect_backends() {
    std::vector<Backend> v{Backend::scalar};
#if defined(EDGEWATT_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2")) {
        v.push_back(Backend::avx2);
    }
#endif
#if defined(EDGEWATT_HAVE_NEON_TU)
    v.push_back(Backend::neon);
#endif
    return v;
}

struct Dispatch {
    std::vector<Backend> available;
    std::atomic<Backend> active;

    Dispatch() : available(detect_backends()), active(available.back()) {
        if (const char* env = std::getenv("EDGEWATT_KERNEL_BACKEND")) {
            for (Backend b : available) {
                if (backend_name(b) == std::string_view(env)) {
                    active = b;
                }
            }
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

// Power-of-two splitter for one extraction pass. Chosen so that every
// partial sum of the extracted high parts stays an exact multiple of the
// extraction grid below 2^53 grid steps, i.e. no addition ever rounds.
double extraction_sigma(double max_abs_val, std::size_t n) {
    int mexp = std::ilogb(max_abs_val);
    int nbits = static_cast<int>(std::bit_width(n));
    return std::ldexp(1.0, mexp + nbits + 3);
}

// Shewchuk summation over the (few) per-pass totals, as in CPython's
// math.fsum: maintains nonoverlapping partials, then rounds once.
double fsum(std::span<const double> xs) {
    std::vector<double> partials;
    for (double x : xs) {
        std::size_t used = 0;
        for (std::size_t j = 0; j < partials.size(); ++j) {
            double y = partials[j];
            if (std::fabs(x) < std::fabs(y)) {
                std::swap(x, y);
            }
            double hi = x + y;
            double lo = y - (hi - x);
            if (lo != 0.0) {
                partials[used++] = lo;
            }
            x = hi;
        }
        partials.resize(used);
        partials.push_back(x);
    }
    double hi = 0.0;
    std::size_t n = partials.size();
    if (n > 0) {
        hi = partials[--n];
        double lo = 0.0;
        while (n > 0) {
            double x = hi;
            double y = partials[--n];
            hi = x + y;
            double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) {
                break;
            }
        }
        // Leftover of exactly half an ulp: round to even like a single fl().
        if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                      (lo > 0.0 && partials[n - 1] > 0.0))) {
            double y = lo * 2.0;
            double x = hi + y;
            if (y == x - hi) {
                hi = x;
            }
        }
    }
    return hi;
}

}  // namespace

std::string_view backend_name(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "unknown";
}

const std::vector<Backend>& available_backends() {
    return dispatch().available;
}

Backend active_backend() {
    return dispatch().active.load();
}

void set_backend(Backend backend) {
    for (Backend b : dispatch().available) {
        if (b == backend) {
            dispatch().active.store(backend);
            return;
        }
    }
    throw ValidationError("kernel backend '" + std::string(backend_name(backend)) +
                          "' is not available on this machine");
}

double sum_exact(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) {
        return 0.0;
    }
    const detail::KernelOps& ops = ops_for(active_backend());
    double m = ops.max_abs(xs.data(), n);
    if (!std::isfinite(m)) {
        throw ValidationError("sum_exact: input contains a non-finite value");
    }
    if (m == 0.0) {
        return 0.0;
    }
    std::vector<double> work(xs.begin(), xs.end());
    std::vector<double> levels;
    for (int pass = 0; pass < 1200 && m != 0.0; ++pass) {
        double sigma = extraction_sigma(m, n);
        if (!std::isfinite(sigma)) {
            throw ValidationError("sum_exact: input magnitude out of supported range");
        }
        levels.push_back(ops.extract_pass(work.data(), n, sigma));
        m = ops.max_abs(work.data(), n);
    }
    if (m != 0.0) {
        // Not reachable for real data; finish exactly either way.
        levels.insert(levels.end(), work.begin(), work.end());
    }
    return fsum(levels);
}

double max_abs(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    return ops_for(active_backend()).max_abs(xs.data(), xs.size());
}

std::size_t first_invalid_sample(std::span<const double> xs) {
    if (xs.empty()) {
        return npos;
    }
    return ops_for(active_backend()).first_invalid(xs.data(), xs.size());
}

}  // namespace edgewatt::kernels
