#include "trimap/kernels.hpp"

#include <immintrin.h>

namespace trimap::kernels {

namespace {

bool cpu_has_avx2_fma() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

PowerSums inv_power_sums_avx2(double x, double y, std::int64_t n0, std::int64_t n1) {
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    const __m256d step = _mm256_set1_pd(4.0 * x);
    const double base = 1.0 + y + static_cast<double>(n0) * x;
    __m256d s = _mm256_setr_pd(base, base + x, base + 2.0 * x, base + 3.0 * x);
    std::int64_t n = n0;
    for (; n + 4 <= n1; n += 4) {
        __m256d r = _mm256_div_pd(_mm256_set1_pd(1.0), s);
        __m256d r2 = _mm256_mul_pd(r, r);
        acc2 = _mm256_add_pd(acc2, r2);
        acc3 = _mm256_fmadd_pd(r2, r, acc3);
        s = _mm256_add_pd(s, step);
    }
    PowerSums out{hsum(acc2), hsum(acc3)};
    if (n < n1) {
        PowerSums rest = scalar_impl().inv_power_sums(x, y, n, n1);
        out.s2 += rest.s2;
        out.s3 += rest.s3;
    }
    return out;
}

double weighted_line_sum_avx2(double x, double y, std::int64_t m, const double* line, int n_line) {
    __m256d acc = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d scale = _mm256_set1_pd(static_cast<double>(n_line));
    const __m256d idx_max = _mm256_set1_pd(static_cast<double>(n_line - 2));
    const __m256d step = _mm256_set1_pd(4.0 * x);
    const double base = 1.0 + y;
    __m256d s = _mm256_setr_pd(base, base + x, base + 2.0 * x, base + 3.0 * x);
    std::int64_t n = 0;
    for (; n + 4 <= m; n += 4) {
        __m256d r = _mm256_div_pd(one, s);
        __m256d t = _mm256_fmsub_pd(r, scale, half);
        __m256d idx = _mm256_floor_pd(t);
        idx = _mm256_min_pd(idx, idx_max);
        idx = _mm256_max_pd(idx, _mm256_setzero_pd());
        __m256d frac = _mm256_sub_pd(t, idx);
        __m128i ii = _mm256_cvttpd_epi32(idx);
        __m256d v0 = _mm256_i32gather_pd(line, ii, 8);
        __m256d v1 = _mm256_i32gather_pd(line + 1, ii, 8);
        __m256d val = _mm256_fmadd_pd(frac, _mm256_sub_pd(v1, v0), v0);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(r, r), val, acc);
        s = _mm256_add_pd(s, step);
    }
    double out = hsum(acc);
    if (n < m) {
        // Remainder in scalar: same recurrence continued from branch n.
        double sc = base + static_cast<double>(n) * x;
        for (; n < m; ++n) {
            double r = 1.0 / sc;
            double t = r * static_cast<double>(n_line) - 0.5;
            auto idx = static_cast<std::int64_t>(t);
            if (idx > n_line - 2) idx = n_line - 2;
            if (idx < 0) idx = 0;
            double frac = t - static_cast<double>(idx);
            out += (r * r) * (line[idx] + frac * (line[idx + 1] - line[idx]));
            sc += x;
        }
    }
    return out;
}

} // namespace

const Impl* avx2_impl() {
    static const Impl impl{"avx2", &inv_power_sums_avx2, &weighted_line_sum_avx2};
    static const bool ok = cpu_has_avx2_fma();
    return ok ? &impl : nullptr;
}

} // namespace trimap::kernels
