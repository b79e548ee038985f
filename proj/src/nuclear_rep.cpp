#include "trimap/nuclear_rep.hpp"

#include <cmath>

#include "trimap/quadrature.hpp"
#include "trimap/special_fn.hpp"

namespace trimap {

HalfLineFunction::HalfLineFunction(std::string name, Eval eval)
    : name_(std::move(name)), eval_(std::move(eval)) {
    double sq = integrate_dm([this](double s) { return eval_(s) * eval_(s); }, 1e-12);
    if (!std::isfinite(sq) || sq < 0.0)
        throw DomainError("HalfLineFunction '" + name_ + "': not square-integrable against dm");
    l2_norm_ = std::sqrt(sq);
    moments_.reserve(max_moments + 1);
    abs_moments_.reserve(max_moments + 1);
    for (int j = 0; j <= max_moments; ++j) {
        // Scale tolerance with the crude envelope int s^j s e^{-s} = (j+1)!.
        double scale = std::exp(std::lgamma(j + 2.0));
        double tol = 1e-13 * std::max(1.0, scale * std::max(1.0, std::abs(eval_(1.0))));
        double mj = integrate_dm([this, j](double s) { return std::pow(s, j) * eval_(s); }, tol);
        double aj =
            integrate_dm([this, j](double s) { return std::pow(s, j) * std::abs(eval_(s)); }, tol);
        moments_.push_back(mj);
        abs_moments_.push_back(aj);
    }
}

double hat_transform(const HalfLineFunction& phi, const TrianglePoint& p, double tol) {
    if (!(tol > 0.0)) throw DomainError("hat_transform: tol must be > 0");
    double inner =
        integrate_dm([&phi, y = p.y](double s) { return std::exp(-s * y) * phi(s); }, tol * p.x);
    return inner / p.x;
}

BanachFunction hat_as_banach(const HalfLineFunction& phi, double tol) {
    // h(x, u) = int e^{-s u x} phi(s) dm(s) = A(u x); Taylor coefficients of A
    // are (-1)^j m_j / j!, with the Lagrange remainder controlled by the
    // absolute moments.
    auto eval_ptr = std::make_shared<HalfLineFunction>(phi);
    double bound = phi.abs_moments()[0];
    auto height = [eval_ptr, tol](double x, double u) {
        return integrate_dm([&](double s) { return std::exp(-s * u * x) * (*eval_ptr)(s); },
                            0.01 * tol);
    };
    auto model = [eval_ptr](double u, double xi_max) {
        LineSeries ls;
        ls.xi_max = xi_max;
        const auto& m = eval_ptr->moments();
        const auto& ma = eval_ptr->abs_moments();
        const int terms = HalfLineFunction::max_moments;
        double sign = 1.0, ufac = 1.0, fact = 1.0;
        for (int j = 0; j < terms; ++j) {
            ls.coeff.push_back(sign * ufac * m[static_cast<std::size_t>(j)] / fact);
            sign = -sign;
            ufac *= u;
            fact *= (j + 1.0);
        }
        double z = u * xi_max;
        ls.remainder_bound =
            ma[static_cast<std::size_t>(terms)] * std::pow(z, terms) / factorial(terms);
        return ls;
    };
    return BanachFunction::from_height("hat(" + phi.name() + ")", height, bound, model);
}

double kernel_K(const HalfLineFunction& phi, double t, double tol) {
    if (!(t >= 0.0)) throw DomainError("kernel_K: t must be >= 0");
    return integrate_dm([&phi, t](double s) { return bessel_kernel(s * t) * phi(s); }, tol);
}

LerchSides lerch_identity_check(double w, int k, double tol) {
    if (!(w > 1.0)) throw DomainError("lerch_identity_check: w must be > 1");
    if (k < 0) throw DomainError("lerch_identity_check: k must be >= 0");
    double series = hurwitz_zeta(k + 2, w);
    double integral =
        integrate_dm([k, w](double t) { return std::pow(t, k) * std::exp(-(w - 1.0) * t); }, tol) /
        factorial(k + 1);
    return {series, integral};
}

double E_series(int k, const TrianglePoint& p, double tol) {
    if (k < 0) throw DomainError("E_series: k must be >= 0");
    if (!(tol > 0.0)) throw DomainError("E_series: tol must be > 0");
    const double x = p.x, y = p.y;
    const double kd = static_cast<double>(k);
    auto term = [&](double m) {
        double s = 1.0 + y + m * x;
        double v = s - x; // = 1 + y + (m-1) x
        return (kd + 1.0) * std::pow(v / s, kd) / (s * s);
    };
    // g'(t) = (k+1) x (v/s)^(k-1) ((k+2)x - 2s) / s^4; at k = 0 the negative
    // power cancels against v and this reduces to -2x/s^3.
    auto deriv = [&](double m) {
        double s = 1.0 + y + m * x;
        double v = s - x;
        return (kd + 1.0) * x * std::pow(v / s, kd - 1.0) * ((kd + 2.0) * x - 2.0 * s) /
               (s * s * s * s);
    };
    double sum = 0.0, comp = 0.0;
    std::int64_t m = 0;
    const std::int64_t m_cap = 1 << 24;
    for (; m < m_cap; ++m) {
        double s = 1.0 + y + static_cast<double>(m) * x;
        double g = term(static_cast<double>(m));
        double t = sum + g;
        comp += (std::abs(sum) >= std::abs(g)) ? (sum - t) + g : (g - t) + sum;
        sum = t;
        bool past_hump = s > 0.5 * (kd + 2.0) * x + x;
        if (past_hump && m >= 8) {
            double em_err = std::abs(deriv(static_cast<double>(m) + 0.5)) / 24.0;
            if (em_err < 0.25 * tol) {
                ++m;
                break;
            }
        }
    }
    if (m >= m_cap)
        throw TruncationError("E_series: term budget exhausted before tolerance", sum + comp, tol);
    // Midpoint tail: int_{m-1/2}^inf (k+1)(s-x)^k s^-(k+2) dt = (1 - v0^(k+1))/x^2,
    // plus the first Euler-Maclaurin correction g'(m-1/2)/24.
    double s0 = 1.0 + y + (static_cast<double>(m) - 0.5) * x;
    double v0 = (s0 - x) / s0;
    double tail = (1.0 - std::pow(v0, kd + 1.0)) / (x * x);
    double correction = deriv(static_cast<double>(m) - 0.5) / 24.0;
    return sum + comp + tail + correction;
}

double E_quad(int k, const TrianglePoint& p, double tol) {
    if (k < 0) throw DomainError("E_quad: k must be >= 0");
    const double x = p.x, y = p.y;
    const double c = (1.0 - x + y) / x;
    return integrate_dm(
        [k, c, x](double t) { return std::exp(-t * c) * laguerre_l1(k, t) / (x * x); }, tol);
}

NuclearApplyResult nuclear_apply(const HalfLineFunction& phi, const TrianglePoint& p, int K,
                                 double tol) {
    if (K < 0) throw DomainError("nuclear_apply: K must be >= 0");
    if (!(tol > 0.0)) throw DomainError("nuclear_apply: tol must be > 0");
    NuclearApplyResult out;
    out.expansion.K = K;
    double value = 0.0;
    double prev_term = 0.0, last_term = 0.0;
    for (int k = 0; k <= K; ++k) {
        double coeff_tol = tol / (100.0 * (K + 1.0) * (k + 1.0));
        double ck = integrate_dm([&phi, k](double s) { return phi(s) * eta(k, s); },
                                 std::max(coeff_tol, 1e-15));
        out.expansion.coefficients.push_back(ck);
        double ek = E_series(k, p, 0.01 * tol / (K + 1.0));
        prev_term = last_term;
        last_term = ck * ek;
        value += last_term;
    }
    out.value = value;
    // Residual estimate from the geometric trend of the last terms.
    double a = std::abs(last_term), b = std::abs(prev_term);
    if (K >= 1 && b > 0.0) {
        double r = std::min(0.9, a / b);
        out.expansion.residual_bound = a * r / (1.0 - r);
    } else {
        out.expansion.residual_bound = a;
    }
    out.expansion.converged = K >= 1 && out.expansion.residual_bound < tol;
    // Eventually-decreasing magnitudes: non-increase must hold from the last
    // local maximum through the end of the computed range.
    const auto& c = out.expansion.coefficients;
    std::size_t last_increase = 0;
    for (std::size_t i = 1; i < c.size(); ++i)
        if (std::abs(c[i]) > std::abs(c[i - 1]) * (1.0 + 1e-12)) last_increase = i;
    out.expansion.coefficients_eventually_decreasing =
        c.size() < 2 || last_increase + 1 < c.size();
    return out;
}

GeneratingSides generating_identity_check(double s, double t, int K) {
    if (K < 0) throw DomainError("generating_identity_check: K must be >= 0");
    if (!(s >= 0.0) || !(t >= 0.0))
        throw DomainError("generating_identity_check: s, t must be >= 0");
    double lhs = bessel_kernel(s * t);
    double sum = 0.0, comp = 0.0;
    for (int k = 0; k <= K; ++k) {
        double term = laguerre_l1(k, t) * eta(k, s);
        double tt = sum + term;
        comp += (std::abs(sum) >= std::abs(term)) ? (sum - tt) + term : (term - tt) + sum;
        sum = tt;
    }
    return {lhs, sum + comp};
}

double e_norm_dm(int k) {
    // [L_k^1]^2 t/(e^t - 1) = [L_k^1 e^{-t/2}]^2 t/(1 - e^{-t}); the scaled
    // form stays finite past t ~ 4k where the factored product overflows.
    double scale = std::max(1.0, std::sqrt(static_cast<double>(k) + 1.0));
    double sq = integrate_halfline_ex(
                    [k](double t) {
                        double l = laguerre_l1_scaled(k, t);
                        return l * l * t / -std::expm1(-t);
                    },
                    1e-9 * scale)
                    .value;
    return std::sqrt(std::max(0.0, sq));
}

double eta_norm_dm(int k) {
    // Scale tolerance by the closed-form magnitude (2k+1)!/((k+1)!)^2 zeta(2k+2, 3)
    // so the quadrature stays meaningful while the values decay geometrically.
    double ln_scale = std::lgamma(2.0 * k + 2.0) - 2.0 * std::lgamma(k + 2.0) -
                      (2.0 * k + 2.0) * std::log(3.0);
    double scale = std::exp(std::max(-650.0, ln_scale));
    double sq = integrate_dm(
        [k](double s) {
            double e = eta(k, s);
            return e * e;
        },
        std::max(1e-280, 1e-8 * scale));
    return std::sqrt(std::max(0.0, sq));
}

std::vector<double> summability_report(int K) {
    if (K < 0) throw DomainError("summability_report: K must be >= 0");
    std::vector<double> partial;
    partial.reserve(static_cast<std::size_t>(K) + 1);
    double acc = 0.0;
    for (int k = 0; k <= K; ++k) {
        acc += e_norm_dm(k) * eta_norm_dm(k);
        partial.push_back(acc);
    }
    return partial;
}

} // namespace trimap
