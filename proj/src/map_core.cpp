#include "trimap/map_core.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace trimap {

namespace {

struct TwoSum {
    double hi;
    double lo;
};

TwoSum two_sum(double a, double b) {
    double s = a + b;
    double bp = s - a;
    double e = (a - (s - bp)) + (b - bp);
    return {s, e};
}

TwoSum two_prod(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);
    return {p, e};
}

// 1 - x - k*y in double-double, accurate to ~1e-30 absolute for the operand
// sizes seen here.  Digit misclassification near cell boundaries is the
// dominant floating failure mode, so residual signs are settled with this.
double residual_dd(double x, double y, double k) {
    TwoSum s = two_sum(1.0, -x);
    TwoSum p = two_prod(k, y);
    TwoSum r = two_sum(s.hi, -p.hi);
    return r.hi + (r.lo + (s.lo - p.lo));
}

constexpr double kBoundaryEps = 1e-14;

} // namespace

TrianglePoint::TrianglePoint(double x, double y) : x(x), y(y) {
    if (!(1.0 > x && x > y && y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("TrianglePoint: need 1 > x > y > 0");
}

RationalTrianglePoint::RationalTrianglePoint(Rational x, Rational y) : x(x), y(y) {
    if (!(Rational(1) > this->x && this->x > this->y && this->y > Rational(0)))
        throw DomainError("RationalTrianglePoint: need 1 > x > y > 0");
}

DigitInfo classify_digit_ex(const TrianglePoint& p) {
    double q = (1.0 - p.x) / p.y;
    if (q >= 9.0e15) {
        // Digit would not be exactly representable; treat as a boundary case.
        return {static_cast<std::int64_t>(q), true};
    }
    auto k = static_cast<std::int64_t>(std::floor(q));
    // Enforce the cell inequalities 1-x-ky >= 0 > 1-x-(k+1)y exactly as
    // stated: closed above, open below.
    double rk = residual_dd(p.x, p.y, static_cast<double>(k));
    if (rk < 0.0) {
        --k;
        rk = residual_dd(p.x, p.y, static_cast<double>(k));
    }
    double rk1 = residual_dd(p.x, p.y, static_cast<double>(k + 1));
    if (rk1 >= 0.0) {
        ++k;
        rk = rk1;
        rk1 = residual_dd(p.x, p.y, static_cast<double>(k + 1));
    }
    if (k < 0) k = 0; // cannot happen for domain points; guards rounding at x+y ~ 1
    bool near = std::min(std::abs(rk), std::abs(rk1)) < kBoundaryEps * std::max(1.0, std::abs(q) * p.y);
    return {k, near};
}

std::int64_t classify_digit(const TrianglePoint& p) { return classify_digit_ex(p).k; }

std::int64_t classify_digit(const RationalTrianglePoint& p) {
    // On the common denominator q the quotient (1-x)/y is (q-p)/r with all
    // entries positive; integer division keeps the lower k on exact ties,
    // matching the closed upper boundary.
    __int128 num = (__int128)p.x.den() * p.y.den() - (__int128)p.x.num() * p.y.den();
    __int128 den = (__int128)p.y.num() * p.x.den();
    return static_cast<std::int64_t>(num / den);
}

StepResult step(const TrianglePoint& p) {
    DigitInfo d = classify_digit_ex(p);
    double xi = p.y / p.x;
    double yi = residual_dd(p.x, p.y, static_cast<double>(d.k)) / p.x;
    if (!(yi > 0.0) || !(xi > yi) || !(xi < 1.0))
        return {d.k, std::nullopt, d.near_boundary};
    return {d.k, TrianglePoint(xi, yi), d.near_boundary};
}

RationalStepResult step(const RationalTrianglePoint& pt) {
    std::int64_t k = classify_digit(pt);
    Rational xi = pt.y / pt.x;
    Rational yi = (Rational(1) - pt.x - Rational(k) * pt.y) / pt.x;
    if (yi == Rational(0) || xi == yi) return {k, std::nullopt};
    return {k, RationalTrianglePoint(xi, yi)};
}

TriangleSequence expand_sequence(const TrianglePoint& p, int n_max) {
    if (n_max < 0) throw DomainError("expand_sequence: n_max must be >= 0");
    TriangleSequence seq;
    seq.digits.reserve(static_cast<std::size_t>(n_max));
    TrianglePoint cur = p;
    for (int i = 0; i < n_max; ++i) {
        StepResult s = step(cur);
        seq.digits.push_back(s.digit);
        if (!s.image) {
            seq.terminated = true;
            break;
        }
        cur = *s.image;
    }
    return seq;
}

TriangleSequence expand_sequence(const RationalTrianglePoint& pt, int n_max) {
    if (n_max < 0) throw DomainError("expand_sequence: n_max must be >= 0");
    // Homogeneous coordinates: x = p/q, y = r/q.  One step maps
    // (p, r, q) -> (r, q - p - k r, p) with k = (q - p) / r, so every entry
    // stays below the seed's common denominator and the loop is pure 64-bit
    // integer arithmetic.
    __int128 g = (__int128)pt.x.den() / std::gcd(pt.x.den(), pt.y.den()) * pt.y.den();
    __int128 p = (__int128)pt.x.num() * (g / pt.x.den());
    __int128 r = (__int128)pt.y.num() * (g / pt.y.den());
    __int128 q = g;

    TriangleSequence seq;
    seq.digits.reserve(static_cast<std::size_t>(n_max));
    for (int i = 0; i < n_max; ++i) {
        __int128 k = (q - p) / r;
        if (k > INT64_MAX) throw std::overflow_error("expand_sequence: digit exceeds 64 bits");
        seq.digits.push_back(static_cast<std::int64_t>(k));
        __int128 np = r, nr = q - p - k * r, nq = p;
        p = np;
        r = nr;
        q = nq;
        // The remainder is < r, so equal coordinates cannot arise in exact
        // arithmetic; y' = 0 is the one true boundary.
        if (r == 0 || p == r) {
            seq.terminated = true;
            break;
        }
    }
    return seq;
}

TrianglePoint inverse_branch(std::int64_t k, const TrianglePoint& p) {
    if (k < 0) throw DomainError("inverse_branch: k must be >= 0");
    double d = 1.0 + static_cast<double>(k) * p.x + p.y;
    return TrianglePoint(1.0 / d, p.x / d);
}

RationalTrianglePoint inverse_branch(std::int64_t k, const RationalTrianglePoint& p) {
    if (k < 0) throw DomainError("inverse_branch: k must be >= 0");
    Rational d = Rational(1) + Rational(k) * p.x + p.y;
    return RationalTrianglePoint(Rational(1) / d, p.x / d);
}

double jacobian_det(const TrianglePoint& p) { return 1.0 / (p.x * p.x * p.x); }

double jacobian_det_fd(const TrianglePoint& p, double h) {
    // Central differences of the branch map with the digit frozen at p's cell.
    auto branch = [k = static_cast<double>(classify_digit(p))](double x, double y) {
        return std::pair<double, double>{y / x, (1.0 - x - k * y) / x};
    };
    auto [fxp, gxp] = branch(p.x + h, p.y);
    auto [fxm, gxm] = branch(p.x - h, p.y);
    auto [fyp, gyp] = branch(p.x, p.y + h);
    auto [fym, gym] = branch(p.x, p.y - h);
    double dfx = (fxp - fxm) / (2 * h), dfy = (fyp - fym) / (2 * h);
    double dgx = (gxp - gxm) / (2 * h), dgy = (gyp - gym) / (2 * h);
    return dfx * dgy - dfy * dgx;
}

} // namespace trimap
