#include "trimap/special_fn.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace trimap {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kPiSqOver6 = 1.64493406684822643647241516664602519;

double dilog_series(double z) {
    // Plain power series; argument is <= 1/2 here so ~50 terms reach 1e-17.
    double term = z, sum = z;
    for (int n = 2; n < 80; ++n) {
        term *= z;
        double add = term / (static_cast<double>(n) * n);
        sum += add;
        if (add < 1e-18 * sum) break;
    }
    return sum;
}

} // namespace

double dilog(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("dilog: argument must lie in [0, 1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return kPiSqOver6;
    if (z <= 0.5) return dilog_series(z);
    // Li2(z) + Li2(1-z) = pi^2/6 - ln(z) ln(1-z)
    return kPiSqOver6 - std::log(z) * std::log1p(-z) - dilog_series(1.0 - z);
}

namespace {

// Series branch of G; long double accumulation keeps the alternating-series
// cancellation below ~1e-15 absolute for u <= 25.
double bessel_kernel_series(double u) {
    long double term = 1.0L, sum = 1.0L;
    const long double lu = static_cast<long double>(u);
    for (int k = 1; k < 400; ++k) {
        term *= -lu / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-22L * (1.0L + std::abs(sum))) break;
    }
    return static_cast<double>(sum);
}

// Miller backward recurrence for J1(z), normalized by J0 + 2 sum J_{2k} = 1.
double bessel_j1_miller(double z) {
    int n_start = static_cast<int>(z + 24.0 + 12.0 * std::cbrt(z));
    if (n_start % 2 != 0) ++n_start;
    double f_up = 0.0;   // unnormalized J at index n+1
    double f = 1e-30;    // unnormalized J at index n
    double sum_even = f; // n_start is even
    double f1 = 0.0;
    for (int n = n_start; n >= 1; --n) {
        double f_down = (2.0 * n / z) * f - f_up; // index n-1
        f_up = f;
        f = f_down;
        int idx = n - 1;
        if (idx == 1)
            f1 = f;
        else if (idx >= 2 && idx % 2 == 0)
            sum_even += f;
        // Rescale to dodge overflow of the unnormalized recurrence.
        if (std::abs(f) > 1e250) {
            f *= 1e-250;
            f_up *= 1e-250;
            sum_even *= 1e-250;
            f1 *= 1e-250;
        }
    }
    double norm = f + 2.0 * sum_even; // f holds index 0 now
    return f1 / norm;
}

// Hankel asymptotic expansion for J1, coefficients mu = 4.
double bessel_j1_asymptotic(double z) {
    const double w = 1.0 / (8.0 * z);
    double p = 1.0, q = 3.0 * w; // leading Q term: (mu-1)/(8z)
    double pterm = 1.0, qterm = 3.0 * w;
    const double mu = 4.0;
    for (int k = 1; k < 14; ++k) {
        // P takes the even factors, Q the odd ones.
        double f1 = mu - (4.0 * k - 3.0) * (4.0 * k - 3.0);
        double f2 = mu - (4.0 * k - 1.0) * (4.0 * k - 1.0);
        pterm *= -f1 * f2 * w * w / ((2.0 * k - 1.0) * 2.0 * k);
        double g1 = mu - (4.0 * k - 1.0) * (4.0 * k - 1.0);
        double g2 = mu - (4.0 * k + 1.0) * (4.0 * k + 1.0);
        qterm *= -g1 * g2 * w * w / (2.0 * k * (2.0 * k + 1.0));
        p += pterm;
        q += qterm;
        if (std::abs(pterm) < 1e-17 && std::abs(qterm) < 1e-17) break;
    }
    double chi = z - 0.75 * kPi;
    return std::sqrt(2.0 / (kPi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace

double bessel_kernel(double u) {
    if (!(u >= 0.0)) throw DomainError("bessel_kernel: argument must be >= 0");
    if (u <= 25.0) return bessel_kernel_series(u);
    double z = 2.0 * std::sqrt(u);
    double j1 = (z < 25.0) ? bessel_j1_miller(z) : bessel_j1_asymptotic(z);
    return j1 * 2.0 / z;
}

double laguerre_l1(int k, double t) {
    if (k < 0) throw DomainError("laguerre_l1: k must be >= 0");
    double lm = 1.0; // L_0^1
    if (k == 0) return lm;
    double lc = 2.0 - t; // L_1^1
    for (int n = 1; n < k; ++n) {
        double ln = ((2.0 * n + 2.0 - t) * lc - (n + 1.0) * lm) / (n + 1.0);
        lm = lc;
        lc = ln;
    }
    return lc;
}

double laguerre_l1_scaled(int k, double t) {
    if (k < 0) throw DomainError("laguerre_l1_scaled: k must be >= 0");
    double scale = std::exp(-0.5 * t);
    double lm = scale;
    if (k == 0) return lm;
    double lc = (2.0 - t) * scale;
    for (int n = 1; n < k; ++n) {
        double ln = ((2.0 * n + 2.0 - t) * lc - (n + 1.0) * lm) / (n + 1.0);
        lm = lc;
        lc = ln;
    }
    return lc;
}

Rational laguerre_l1_exact(int k, const Rational& t) {
    if (k < 0) throw DomainError("laguerre_l1_exact: k must be >= 0");
    Rational lm(1);
    if (k == 0) return lm;
    Rational lc = Rational(2) - t;
    for (int n = 1; n < k; ++n) {
        Rational ln = ((Rational(2 * n + 2) - t) * lc - Rational(n + 1) * lm) / Rational(n + 1);
        lm = lc;
        lc = ln;
    }
    return lc;
}

double eta(int k, double s) {
    if (k < 0 || !(s >= 0.0)) throw DomainError("eta: need k >= 0 and s >= 0");
    if (s == 0.0) return k == 0 ? 1.0 : 0.0;
    if (k == 0) return std::exp(-s);
    return std::exp(static_cast<double>(k) * std::log(s) - s - std::lgamma(static_cast<double>(k) + 2.0));
}

double factorial(int n) {
    static const std::array<double, 171> table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    if (n < 0 || n > 170) throw DomainError("factorial: argument out of range");
    return table[static_cast<std::size_t>(n)];
}

double hurwitz_zeta(int s, double a) {
    if (s < 2) throw DomainError("hurwitz_zeta: s must be an integer >= 2");
    if (!(a > 0.0)) throw DomainError("hurwitz_zeta: a must be > 0");
    // Shift until the Euler-Maclaurin asymptotic is in its comfort zone.
    double head = 0.0, comp = 0.0;
    while (a < 16.0) {
        double term = std::pow(a, -s);
        double t = head + term;
        comp += (std::abs(head) >= std::abs(term)) ? (head - t) + term : (term - t) + head;
        head = t;
        a += 1.0;
    }
    // zeta(s, a) = a^{1-s}/(s-1) + a^{-s}/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} a^{-s-2j+1}
    static const double bern[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30,
                                  5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
    double inv_a = 1.0 / a;
    double a_pow = std::pow(a, -s); // a^{-s}
    double tail = a_pow * a / (s - 1.0) + 0.5 * a_pow;
    double rising = static_cast<double>(s); // (s)_1
    double fac = 2.0;                       // (2j)!
    double apw = a_pow * inv_a;             // a^{-s-1}
    for (int j = 1; j <= 8; ++j) {
        tail += bern[j - 1] / fac * rising * apw;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fac *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        apw *= inv_a * inv_a;
    }
    return head + comp + tail;
}

} // namespace trimap
