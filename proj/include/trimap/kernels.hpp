#pragma once

#include <cstdint>

namespace trimap::kernels {

// Partial branch power sums: over n in [n0, n1),
//   s2 = sum (1 + y + n x)^-2,   s3 = sum (1 + y + n x)^-3.
struct PowerSums {
    double s2;
    double s3;
};

// Weighted read of a sampled preimage line: over n in [0, M),
//   sum (1 + y + n x)^-2 * interp(line, xi_n),  xi_n = 1/(1 + y + n x),
// where interp is linear between cell centers (i + 1/2)/n_line and
// extrapolates linearly from the closest pair beyond either end.
//
// These two loops are the arithmetic core of operator application and grid
// sweeps; everything else in the library is orchestration around them.

using PowerSumsFn = PowerSums (*)(double x, double y, std::int64_t n0, std::int64_t n1);
using LineSumFn = double (*)(double x, double y, std::int64_t m, const double* line, int n_line);

struct Impl {
    const char* name;
    PowerSumsFn inv_power_sums;
    LineSumFn weighted_line_sum;
};

// Scalar reference implementation (always available).
const Impl& scalar_impl();

// AVX2 implementation; null if not compiled in or the CPU lacks AVX2+FMA.
const Impl* avx2_impl();

// Active implementation: AVX2 when available unless TRIMAP_SIMD=scalar.
// TRIMAP_SIMD=avx2 forces AVX2 and aborts if unavailable.
const Impl& active();

inline PowerSums inv_power_sums(double x, double y, std::int64_t n0, std::int64_t n1) {
    return active().inv_power_sums(x, y, n0, n1);
}

inline double weighted_line_sum(double x, double y, std::int64_t m, const double* line, int n_line) {
    return active().weighted_line_sum(x, y, m, line, n_line);
}

} // namespace trimap::kernels
