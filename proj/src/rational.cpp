#include "trimap/rational.hpp"

#include <numeric>
#include <ostream>
#include <sstream>

namespace trimap {

namespace {

std::int64_t checked_cast(__int128 v, const char* op) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error(std::string("Rational overflow in ") + op);
    return static_cast<std::int64_t>(v);
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw DomainError("Rational: zero denominator");
    normalize();
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

namespace {

__int128 gcd128(__int128 x, __int128 y) {
    if (x < 0) x = -x;
    while (y != 0) {
        __int128 t = x % y;
        x = y;
        y = t;
    }
    return x;
}

} // namespace

Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    // Reduce in 128 bits before casting down so intermediate blowups survive.
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rational(checked_cast(n, "+"), checked_cast(d, "+"));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    __int128 n = (__int128)(a.num_ / g1) * (b.num_ / g2);
    __int128 d = (__int128)(a.den_ / g2) * (b.den_ / g1);
    return Rational(checked_cast(n, "*"), checked_cast(d, "*"));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("Rational: division by zero");
    return a * Rational(b.den_, b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
}

std::string Rational::to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text), 1);
        std::int64_t p = std::stoll(text.substr(0, slash));
        std::int64_t q = std::stoll(text.substr(slash + 1));
        return Rational(p, q);
    } catch (const std::invalid_argument&) {
        throw DomainError("Rational: cannot parse '" + text + "'");
    } catch (const std::out_of_range&) {
        throw DomainError("Rational: value out of range in '" + text + "'");
    }
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num();
    if (r.den() != 1) os << '/' << r.den();
    return os;
}

} // namespace trimap
