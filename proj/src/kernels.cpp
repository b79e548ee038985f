#include "trimap/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace trimap::kernels {

namespace {

PowerSums inv_power_sums_scalar(double x, double y, std::int64_t n0, std::int64_t n1) {
    double s2 = 0.0, s3 = 0.0;
    double s = 1.0 + y + static_cast<double>(n0) * x;
    for (std::int64_t n = n0; n < n1; ++n) {
        double r = 1.0 / s;
        double r2 = r * r;
        s2 += r2;
        s3 += r2 * r;
        s += x;
    }
    return {s2, s3};
}

double weighted_line_sum_scalar(double x, double y, std::int64_t m, const double* line,
                                int n_line) {
    double acc = 0.0;
    double s = 1.0 + y;
    const double scale = static_cast<double>(n_line);
    for (std::int64_t n = 0; n < m; ++n) {
        double r = 1.0 / s;
        double t = r * scale - 0.5;
        auto idx = static_cast<std::int64_t>(t); // t >= 0 here: xi >= 1/(2 n_line) while n < m
        if (idx > n_line - 2) idx = n_line - 2;
        if (idx < 0) idx = 0;
        double frac = t - static_cast<double>(idx);
        double v0 = line[idx];
        double v1 = line[idx + 1];
        acc += (r * r) * (v0 + frac * (v1 - v0));
        s += x;
    }
    return acc;
}

} // namespace

const Impl& scalar_impl() {
    static const Impl impl{"scalar", &inv_power_sums_scalar, &weighted_line_sum_scalar};
    return impl;
}

#if !defined(TRIMAP_HAVE_AVX2_BUILD)
const Impl* avx2_impl() { return nullptr; }
#endif

const Impl& active() {
    static const Impl* chosen = [] {
        const char* env = std::getenv("TRIMAP_SIMD");
        const Impl* avx2 = avx2_impl();
        if (env != nullptr) {
            if (std::strcmp(env, "scalar") == 0) return &scalar_impl();
            if (std::strcmp(env, "avx2") == 0) {
                if (avx2 == nullptr)
                    throw std::runtime_error("TRIMAP_SIMD=avx2 requested but AVX2 is unavailable");
                return avx2;
            }
        }
        return avx2 != nullptr ? avx2 : &scalar_impl();
    }();
    return *chosen;
}

} // namespace trimap::kernels
