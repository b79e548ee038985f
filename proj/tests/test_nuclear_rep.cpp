#include <doctest.h>

#include <cmath>
#include <random>

#include "trimap/nuclear_rep.hpp"
#include "trimap/quadrature.hpp"
#include "trimap/reports.hpp"
#include "trimap/special_fn.hpp"

using namespace trimap;

namespace {

HalfLineFunction phi_star() {
    return HalfLineFunction("(1-e^-s)/s", [](double s) {
        return s < 1e-8 ? 1.0 - 0.5 * s : -std::expm1(-s) / s;
    });
}

HalfLineFunction phi_exp() {
    return HalfLineFunction("e^-s", [](double s) { return std::exp(-s); });
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

TEST_CASE("registration computes finite dm-norms and moments") {
    HalfLineFunction f = phi_exp();
    CHECK(f.l2_norm_dm() > 0.0);
    // m_0 = int e^-s dm = pi^2/6 - 1
    CHECK(std::abs(f.moments()[0] - 0.6449340668482264) < 1e-12);
    // m_j = (j+1)! (zeta(j+2) - 1) for phi = e^-s
    for (int j = 1; j <= 6; ++j) {
        double ref = factorial(j + 1) * (hurwitz_zeta(j + 2, 1.0) - 1.0);
        CHECK(std::abs(f.moments()[static_cast<std::size_t>(j)] - ref) <
              1e-11 * std::max(1.0, ref));
    }
}

TEST_CASE("hat transform: the worked fixed-point pair and the e^-s series oracle") {
    HalfLineFunction fs = phi_star();
    TrianglePoint p(0.5, 0.25);
    CHECK(std::abs(hat_transform(fs, p, 1e-12) - 1.6) < 1e-10);

    // 50-point sample of hat(phi*) = 1/(x(1+y))
    for (int i = 0; i < 50; ++i) {
        double x = 0.05 + 0.018 * i;
        double y = 0.6 * x;
        TrianglePoint q(x, y);
        CHECK(std::abs(hat_transform(fs, q, 1e-12) - 1.0 / (x * (1.0 + y))) < 1e-10);
    }

    // hat(e^-s)(x, y) = zeta(2, 2 + y)/x by expanding 1/(e^s - 1)
    HalfLineFunction fe = phi_exp();
    for (auto [x, y] : std::initializer_list<std::pair<double, double>>{
             {0.6, 0.3}, {0.35, 0.1}, {0.9, 0.55}}) {
        double ref = hurwitz_zeta(2, 2.0 + y) / x;
        CHECK(std::abs(hat_transform(fe, TrianglePoint(x, y), 1e-12) - ref) < 1e-10);
    }
    CHECK(hat_transform(HalfLineFunction("zero", [](double) { return 0.0; }), p, 1e-10) == 0.0);
}

TEST_CASE("kernel_K: t = 0 reduces to the plain dm integral") {
    HalfLineFunction fe = phi_exp();
    CHECK(std::abs(kernel_K(fe, 0.0, 1e-12) - fe.moments()[0]) < 1e-11);
}

TEST_CASE("kernel_K on eta_j equals its Laguerre expansion") {
    HalfLineFunction eta2("eta_2", [](double s) { return eta(2, s); });
    for (double t : {0.5, 2.0, 7.0}) {
        double lhs = kernel_K(eta2, t, 1e-12);
        double rhs = 0.0;
        for (int k = 0; k <= 80; ++k) {
            double ip = integrate_dm([&](double s) { return eta(2, s) * eta(k, s); }, 1e-15);
            rhs += laguerre_l1(k, t) * ip;
        }
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("Lerch identity: trivial case and the w x k grid") {
    LerchSides base = lerch_identity_check(2.0, 0, 1e-12);
    CHECK(std::abs(base.series_side - 0.6449340668482264) < 1e-13);
    CHECK(std::abs(base.integral_side - 0.6449340668482264) < 1e-12);
    for (double w : {1.2, 1.5, 2.0, 5.0, 10.0})
        for (int k = 0; k <= 6; ++k) {
            LerchSides ls = lerch_identity_check(w, k, 1e-12);
            CHECK(std::abs(ls.series_side - ls.integral_side) < 1e-10);
        }
    CHECK_THROWS_AS(lerch_identity_check(1.0, 0, 1e-10), DomainError);
}

TEST_CASE("E_series: first-term sanity and the frozen k=0 value") {
    TrianglePoint p(0.5, 0.25);
    // m = 0 term alone: (1+y-x)^k/(1+y)^(k+2) (k+1) = 1/1.5625 = 0.64 at k=0
    CHECK(std::abs(1.0 / (1.25 * 1.25) - 0.64) < 1e-15);
    CHECK(std::abs(E_series(0, p, 1e-12) - 1.961431024400939) < 1e-11);
    CHECK(std::abs(E_series(3, p, 1e-12) - 3.758902982402496) < 1e-11);
}

TEST_CASE("E_series equals E_quad on 20 random (k <= 10, p) pairs") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        int k = static_cast<int>(rng() % 11);
        double x = 0.1 + 0.85 * uniform01(rng);
        double y = x * (0.05 + 0.9 * uniform01(rng));
        TrianglePoint p(x, y);
        double es = E_series(k, p, 1e-10);
        double eq = E_quad(k, p, 1e-10);
        CHECK(std::abs(es - eq) < 1e-8);
    }
}

TEST_CASE("E_series third route: binomial-Hurwitz closed form for small k") {
    // (k+1) sum_m (s-x)^k s^-(k+2) = (k+1) sum_j C(k,j) (-x)^j x^-(j+2) zeta(j+2, w)
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        int k = static_cast<int>(rng() % 7);
        double x = 0.2 + 0.7 * uniform01(rng);
        double y = x * (0.1 + 0.8 * uniform01(rng));
        TrianglePoint p(x, y);
        double w = (1.0 + y) / x;
        double closed = 0.0, binom = 1.0;
        for (int j = 0; j <= k; ++j) {
            closed += binom * std::pow(-x, j) * std::pow(x, -(j + 2.0)) * hurwitz_zeta(j + 2, w);
            binom *= static_cast<double>(k - j) / (j + 1.0);
        }
        closed *= (k + 1.0);
        CHECK(std::abs(E_series(k, p, 1e-11) - closed) < 1e-9 * std::max(1.0, closed));
    }
}

TEST_CASE("E_quad limit: x -> 1, y -> 0 approaches pi^2/6") {
    TrianglePoint p(0.999, 0.0005);
    CHECK(std::abs(E_quad(0, p, 1e-10) - 1.6449340668482264) < 5e-3);
}

TEST_CASE("E_quad is linear in the expansion member") {
    TrianglePoint p(0.45, 0.2);
    double e0 = E_quad(0, p, 1e-11), e1 = E_quad(1, p, 1e-11);
    double both = integrate_dm(
        [&p](double t) {
            double c = (1.0 - p.x + p.y) / p.x;
            return std::exp(-t * c) * (laguerre_l1(0, t) + laguerre_l1(1, t)) / (p.x * p.x);
        },
        1e-11);
    CHECK(std::abs(both - (e0 + e1)) < 1e-9);
}

TEST_CASE("E growth bound: fitted constant is stable through k = 50") {
    TrianglePoint p(0.3, 0.1);
    double cmax = 0.0;
    for (int k = 0; k <= 50; ++k) {
        double e = E_series(k, p, 1e-9);
        double ratio = e * p.x * p.x / ((k + 1.0) * (1.0 + p.y));
        cmax = std::max(cmax, ratio);
    }
    // The k = 0 member dominates; the fitted constant stays put.
    CHECK(cmax < 0.3);
    CHECK(cmax > 0.2);
}

TEST_CASE("nuclear_apply: the fixed-point pair reaches 1.6 by K = 40") {
    HalfLineFunction fs = phi_star();
    auto res = nuclear_apply(fs, TrianglePoint(0.5, 0.25), 40, 1e-8);
    CHECK(std::abs(res.value - 1.6) < 1e-6);
    CHECK(res.expansion.converged);
    CHECK(res.expansion.coefficients.size() == 41);
    // <phi*, eta_k> = 2^-(k+1)/(k+1) exactly
    for (int k = 0; k <= 12; ++k) {
        double exact = 1.0 / ((k + 1.0) * std::pow(2.0, k + 1.0));
        CHECK(std::abs(res.expansion.coefficients[static_cast<std::size_t>(k)] - exact) < 1e-12);
    }
}

TEST_CASE("nuclear_apply of zero returns zero with all-zero coefficients") {
    HalfLineFunction z("zero", [](double) { return 0.0; });
    auto res = nuclear_apply(z, TrianglePoint(0.5, 0.25), 10, 1e-8);
    CHECK(res.value == 0.0);
    for (double c : res.expansion.coefficients) CHECK(std::abs(c) < 1e-14);
}

TEST_CASE("expansion route matches direct operator application for phi = e^-s") {
    HalfLineFunction fe = phi_exp();
    BanachFunction fhat = hat_as_banach(fe, 1e-10);
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 5; ++trial) {
        double x = 0.1 + 0.8 * uniform01(rng);
        double y = x * (0.1 + 0.8 * uniform01(rng));
        TrianglePoint p(x, y);
        double direct = apply_L(fhat, p, 1e-9);
        double via = nuclear_apply(fe, p, 60, 1e-8).value;
        CHECK(std::abs(direct - via) < 1e-6);
    }
}

TEST_CASE("expansion error decreases in K beyond 10") {
    HalfLineFunction fs = phi_star();
    TrianglePoint p(0.4, 0.15);
    BanachFunction fhat = hat_as_banach(fs, 1e-10);
    double direct = apply_L(fhat, p, 1e-10);
    double prev = 1e9;
    for (int K : {10, 20, 30, 40}) {
        double err = std::abs(nuclear_apply(fs, p, K, 1e-9).value - direct);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("K = 0 expansion reports not-converged") {
    HalfLineFunction fs = phi_star();
    auto res = nuclear_apply(fs, TrianglePoint(0.5, 0.25), 0, 1e-8);
    CHECK_FALSE(res.expansion.converged);
}

TEST_CASE("generating identity: s = 0 base case and two frozen pairs") {
    GeneratingSides g0 = generating_identity_check(0.0, 3.0, 40);
    CHECK(g0.kernel_value == 1.0);
    CHECK(g0.partial_sum == doctest::Approx(1.0).epsilon(1e-15));

    GeneratingSides g1 = generating_identity_check(1.0, 1.0, 60);
    CHECK(std::abs(g1.kernel_value - g1.partial_sum) < 1e-10);
    GeneratingSides g2 = generating_identity_check(4.0, 9.0, 120);
    CHECK(std::abs(g2.kernel_value - g2.partial_sum) < 1e-8);
}

TEST_CASE("generating identity across a 5x5 grid at K = 120") {
    const double pts[] = {0.5, 1.0, 2.0, 4.0, 8.0};
    for (double s : pts)
        for (double t : pts) {
            GeneratingSides g = generating_identity_check(s, t, 120);
            CHECK(std::abs(g.kernel_value - g.partial_sum) < 1e-8);
        }
}

TEST_CASE("expansion coefficients are flagged as eventually decreasing") {
    HalfLineFunction fs = phi_star();
    auto res = nuclear_apply(fs, TrianglePoint(0.5, 0.25), 20, 1e-8);
    CHECK(res.expansion.coefficients_eventually_decreasing);
    std::string j = nuclear_expansion_json(res.expansion, false);
    CHECK(j.find("coefficients_eventually_decreasing") != std::string::npos);
}

TEST_CASE("family norms stay finite out to k = 200") {
    double e200 = e_norm_dm(200);
    double eta200 = eta_norm_dm(200);
    CHECK(std::isfinite(e200));
    CHECK(e200 > 0.0);
    CHECK(std::isfinite(eta200));
    CHECK(eta200 >= 0.0);
    CHECK(eta200 < 1e-30); // geometric decay has long since taken over
}

TEST_CASE("summability: eta_0 norm oracle, monotone increase, flattening") {
    // ||eta_0||^2 = int e^-2s dm = sum_{m>=3} 1/m^2 = zeta(2,3)
    CHECK(std::abs(eta_norm_dm(0) * eta_norm_dm(0) - hurwitz_zeta(2, 3.0)) < 1e-10);

    auto part = summability_report(100);
    REQUIRE(part.size() == 101);
    for (std::size_t j = 1; j < part.size(); ++j) CHECK(part[j] >= part[j - 1]);
    CHECK(part[100] - part[99] < 1e-6);
    // Cross-check the head against a 25-digit evaluation.
    CHECK(std::abs(part[0] - 0.8060027920035776) < 1e-9);
    CHECK(std::abs(part[1] - 1.1266270788096356) < 1e-9);
    CHECK(std::abs(part[11] - 1.5781597126784320) < 1e-8);
}

TEST_CASE("E_k is square-integrable in y per x, not in x and y jointly") {
    // L^2(dy) at fixed x: finite and stable under refinement.
    double x = 0.4;
    auto l2y = [&](double tol) {
        return integrate_adaptive(
            [&](double y) {
                double e = E_series(2, TrianglePoint(x, y), 1e-10);
                return e * e;
            },
            1e-6, x - 1e-6, tol);
    };
    double a = l2y(1e-6), b = l2y(1e-8);
    CHECK(std::isfinite(a));
    CHECK(std::abs(a - b) < 1e-5 * std::max(1.0, std::abs(b)));

    // Divergence demonstration in x: E_0 ~ 1/(x(1+y)) as x -> 0, so the
    // sliced mass over (eps, 2 eps) doubles each time eps halves and the
    // joint (x, y) integral diverges logarithmically.
    auto mass = [&](double eps) {
        return integrate_adaptive(
            [&](double xx) {
                double e = E_series(0, TrianglePoint(xx, 0.4 * xx), 1e-8);
                return e * e;
            },
            eps, 2.0 * eps, 1e-8);
    };
    double m1 = mass(0.1), m2 = mass(0.05), m3 = mass(0.025);
    CHECK(m2 > 1.8 * m1);
    CHECK(m3 > 1.8 * m2);
}

TEST_CASE("nuclear expansion serializes with K + 1 coefficients") {
    HalfLineFunction fs = phi_star();
    auto res = nuclear_apply(fs, TrianglePoint(0.5, 0.25), 7, 1e-8);
    std::string j = nuclear_expansion_json(res.expansion, false);
    CHECK(j.find("coefficients") != std::string::npos);
    std::size_t count = 0;
    for (std::size_t pos = j.find("coefficients"); pos < j.find(']', j.find("coefficients"));
         ++pos)
        if (j[pos] == ',') ++count;
    CHECK(count + 1 == 8);
}
