#pragma once

#include <cstdint>

#include "trimap/errors.hpp"
#include "trimap/rational.hpp"

namespace trimap {

// Dilogarithm Li2(z) = sum z^n / n^2 on [0, 1], absolute accuracy ~1e-15.
// Uses the reflection identity for z > 1/2 so the series argument stays small.
double dilog(double z);

// G(u) = J1(2 sqrt u)/sqrt u as the entire series sum (-u)^k / (k! (k+1)!).
// Implemented directly as a function of u (no removable singularity), with a
// Miller backward-recurrence branch and a Hankel asymptotic branch once the
// series starts losing digits to cancellation.  Absolute accuracy ~1e-13 for
// u <= 1e4.
double bessel_kernel(double u);

// Generalized Laguerre polynomial of order 1, degree k, by the three-term
// recurrence.  Normalization: L_k^1(0) = k + 1.
double laguerre_l1(int k, double t);

// L_k^1(t) e^{-t/2}: the recurrence run on scaled values, so squares against
// exponential weights stay inside double range out to k of a few hundred.
double laguerre_l1_scaled(int k, double t);

// Exact-rational flavor of the recurrence (test oracle; overflows ~k > 15 for
// non-tiny denominators and then throws).
Rational laguerre_l1_exact(int k, const Rational& t);

// eta_k(s) = s^k e^{-s} / (k+1)!, in log space for large k so that values like
// k = 100, s = 50 stay finite.
double eta(int k, double s);

// Hurwitz zeta sum_{n>=0} (n + a)^{-s} for integer s >= 2, a > 0, by
// Euler-Maclaurin after shifting a past 16.  Absolute accuracy ~1e-15 * value.
double hurwitz_zeta(int s, double a);

// lgamma-free small factorials (exact in double through 170!).
double factorial(int n);

} // namespace trimap
