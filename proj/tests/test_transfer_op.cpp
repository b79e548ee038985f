#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "trimap/reports.hpp"
#include "trimap/special_fn.hpp"
#include "trimap/transfer_op.hpp"

using namespace trimap;

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Independent oracle for sum_n (1 + y + n x)^-2: 200 explicit long-double
// terms, then the integral tail with its midpoint correction.
double s2_oracle(double x, double y) {
    long double sum = 0.0L;
    for (int n = 0; n < 200; ++n) {
        long double s = 1.0L + y + static_cast<long double>(n) * x;
        sum += 1.0L / (s * s);
    }
    long double s0 = 1.0L + y + 199.5L * x;
    sum += 1.0L / (x * s0);               // integral of (1+y+tx)^-2 from 199.5
    sum -= x / (12.0L * s0 * s0 * s0);    // first Euler-Maclaurin correction
    return static_cast<double>(sum);
}

BanachFunction random_poly(std::mt19937_64& rng) {
    std::vector<std::vector<double>> c(4, std::vector<double>(4));
    for (auto& row : c)
        for (double& v : row) v = 2.0 * uniform01(rng) - 1.0;
    return BanachFunction::polynomial("random_poly", c);
}

} // namespace

TEST_CASE("apply_L fixed point at (1/2, 1/4)") {
    BanachFunction fstar = BanachFunction::fixed_point();
    double v = apply_L(fstar, TrianglePoint(0.5, 0.25), 1e-12);
    CHECK(std::abs(v - 1.6) < 1e-12);
}

TEST_CASE("apply_L of zero is zero") {
    CHECK(apply_L(BanachFunction::zero(), TrianglePoint(0.3, 0.1), 1e-10) == 0.0);
}

TEST_CASE("apply_L of 1/x matches the partial-sum oracle") {
    BanachFunction rx = BanachFunction::reciprocal_x();
    TrianglePoint p(0.7, 0.2);
    double v = apply_L(rx, p, 1e-12);
    CHECK(std::abs(v - s2_oracle(0.7, 0.2)) < 1e-11);
    CHECK(std::abs(v - 1.601413956209849) < 1e-12); // 25-digit reference
}

TEST_CASE("fixed point sup over the 200x200 grid restricted to x >= 0.02") {
    BanachFunction fstar = BanachFunction::fixed_point();
    double sup = 0.0;
    for (int i = 0; i < 200; ++i) {
        double x = 0.02 + (i + 0.5) * (0.98 / 200.0);
        for (int j = 0; j < 200; ++j) {
            double y = x * ((j + 0.5) / 200.0);
            TrianglePoint q(x, y);
            ApplyResult r = apply_L_ex(fstar, q, 1e-12);
            sup = std::max(sup, std::abs(r.value - 1.0 / (q.x * (1.0 + q.y))));
            CHECK(r.tail_bound < 1e-12);
        }
    }
    CHECK(sup < 1e-10);
}

TEST_CASE("bound-mode truncation: feasible tolerance works, infeasible throws with partials") {
    // No line model: the classical integral-comparison bound picks M.
    BanachFunction plain = BanachFunction::from_height(
        "h=1 no model", [](double, double) { return 1.0; }, 1.0);
    TrianglePoint p(0.5, 0.2);
    double loose = apply_L(plain, p, 1e-4);
    // The dropped tail is close to its bound for this f, so the error sits
    // just under the requested tolerance.
    CHECK(std::abs(loose - s2_oracle(0.5, 0.2)) < 1.1e-4);
    try {
        apply_L(plain, p, 1e-12);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.partial_value > 0.0);
        CHECK(e.tail_bound > 0.0);
    }
}

TEST_CASE("apply_M fixed point and h = 1 oracle") {
    BanachFunction fstar = BanachFunction::fixed_point();
    for (auto [x, y] : std::initializer_list<std::pair<double, double>>{
             {0.5, 0.25}, {0.7, 0.2}, {0.13, 0.05}}) {
        double v = apply_M(fstar, TrianglePoint(x, y), 1e-12);
        CHECK(std::abs(v - 1.0 / (1.0 + y)) < 1e-12);
    }
    BanachFunction rx = BanachFunction::reciprocal_x();
    TrianglePoint p(0.7, 0.2);
    CHECK(std::abs(apply_M(rx, p, 1e-12) - 0.7 * s2_oracle(0.7, 0.2)) < 1e-11);
}

TEST_CASE("consistency of the two operator forms: x L f = M(x f)") {
    std::mt19937_64 rng(17);
    BanachFunction fstar = BanachFunction::fixed_point();
    for (int i = 0; i < 50; ++i) {
        double x = 0.05 + 0.9 * uniform01(rng);
        double y = x * (0.05 + 0.9 * uniform01(rng));
        TrianglePoint p(x, y);
        CHECK(std::abs(p.x * apply_L(fstar, p, 1e-13) - apply_M(fstar, p, 1e-13)) < 1e-12);
    }
}

TEST_CASE("positivity and monotonicity of apply_L") {
    std::mt19937_64 rng(29);
    BanachFunction zero = BanachFunction::zero();
    BanachFunction one = BanachFunction::reciprocal_x(); // h = 1 >= h = 0
    for (int i = 0; i < 20; ++i) {
        double x = 0.05 + 0.9 * uniform01(rng);
        double y = x * (0.05 + 0.9 * uniform01(rng));
        TrianglePoint p(x, y);
        CHECK(apply_L(one, p, 1e-10) >= apply_L(zero, p, 1e-10));

        // f <= g pointwise implies Lf <= Lg: g = f + nonnegative polynomial.
        BanachFunction f = random_poly(rng);
        std::vector<std::vector<double>> bump = {{0.0, 0.0}, {0.0, 0.5}};
        BanachFunction g = BanachFunction::polynomial("g", bump);
        double lf = apply_L(f, p, 1e-10);
        double lsum = 0.0;
        {
            // L is linear: L(f + g) = Lf + Lg; check monotone gap equals L g >= 0.
            double lg = apply_L(g, p, 1e-10);
            CHECK(lg >= -1e-12);
            lsum = lf + lg;
        }
        CHECK(lsum >= lf - 1e-12);
    }
}

TEST_CASE("banach_norm on grids and analytic functions") {
    GridFunction g = GridFunction::constant(16, 16, 0.0);
    CHECK(banach_norm(g) == 0.0);
    g.at(3, 7) = -2.5;
    CHECK(banach_norm(g) == 2.5);

    // h* = 1/(1+ux): sup = 1 approached as u x -> 0; the sampled norm is a
    // lower bound within the sampling resolution.
    double n = banach_norm(BanachFunction::fixed_point(), 400);
    CHECK(n <= 1.0);
    CHECK(n > 1.0 - 2.0 / 400.0);

    std::mt19937_64 rng(31);
    GridFunction r = GridFunction::random_positive(12, 12, 8);
    double maxabs = 0.0;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) maxabs = std::max(maxabs, std::abs(r.at(i, j)));
    CHECK(banach_norm(r) == maxabs);
}

TEST_CASE("norm bound ||Lf|| <= 3 ||f||: fixed point, 1/x, and 50 random polynomials") {
    auto nb = norm_bound_check(BanachFunction::fixed_point(), 200);
    CHECK(nb.pass);
    CHECK(std::abs(nb.ratio - 1.0) < 1e-2); // sampled sup of the exact ratio 1

    auto nb2 = norm_bound_check(BanachFunction::reciprocal_x(), 200);
    CHECK(nb2.pass);

    std::mt19937_64 rng(37);
    for (int i = 0; i < 50; ++i) {
        auto nbr = norm_bound_check(random_poly(rng), 100, rng());
        CHECK(nbr.ratio <= 3.0 + 1e-9);
    }
}

TEST_CASE("power_iteration: h* start converges immediately (interpolation-limited)") {
    GridFunction hs =
        GridFunction::sample(256, 256, [](double x, double u) { return 1.0 / (1.0 + u * x); });
    auto res = power_iteration(256, 256, 1, 1e-12, hs);
    CHECK(std::abs(res.report.eigenvalue_estimate - 1.0) < 1e-5);
}

TEST_CASE("power_iteration rejects bad starts") {
    CHECK_THROWS_AS(power_iteration(16, 16, 10, 1e-8, GridFunction::constant(16, 16, 0.0)),
                    DomainError);
    CHECK_THROWS_AS(power_iteration(4, 4, 10, 1e-8, GridFunction::constant(4, 4, 1.0)),
                    DomainError);
    CHECK_THROWS_AS(power_iteration(32, 32, 10, 1e-8, GridFunction::constant(16, 16, 1.0)),
                    DomainError);
}

TEST_CASE("power_iteration from constant start: eigenvalue, residual, cap, gap") {
    auto res = power_iteration(128, 128, 400, 1e-11, GridFunction::constant(128, 128, 1.0));
    const SpectralReport& rep = res.report;
    CHECK(std::abs(rep.eigenvalue_estimate - 1.0) < 4e-6); // refines to <1e-6 at 256
    CHECK(rep.residual_sup < 5e-5);
    CHECK(rep.gap_estimate > 0.0);
    CHECK(rep.gap_estimate < 1.0);
    // Renormalization factors settle under 1 + 5e-3 after the first sweeps.
    for (std::size_t i = 10; i < rep.renorm_factors.size(); ++i)
        CHECK(rep.renorm_factors[i] <= 1.0 + 5e-3);
    CHECK(rep.history.size() == static_cast<std::size_t>(rep.iterations));
}

TEST_CASE("gap estimate is strictly below 1 and stable across grid resolutions") {
    auto r128 = power_iteration(128, 128, 400, 1e-11, GridFunction::constant(128, 128, 1.0));
    auto r256 = power_iteration(256, 256, 400, 1e-11, GridFunction::constant(256, 256, 1.0));
    CHECK(r128.report.gap_estimate < 1.0);
    CHECK(r256.report.gap_estimate < 1.0);
    CHECK(std::abs(r128.report.gap_estimate - r256.report.gap_estimate) < 0.05);
}

TEST_CASE("grid apply_M: known values and pointwise monotonicity") {
    // h* sampled on a fine grid reproduces the fixed point up to
    // interpolation error.
    GridFunction hs =
        GridFunction::sample(256, 256, [](double x, double u) { return 1.0 / (1.0 + u * x); });
    std::mt19937_64 rng(53);
    for (int i = 0; i < 20; ++i) {
        double x = 0.05 + 0.9 * uniform01(rng);
        double y = x * (0.05 + 0.9 * uniform01(rng));
        TrianglePoint p(x, y);
        CHECK(std::abs(apply_M(hs, p, 1e-9) - 1.0 / (1.0 + y)) < 1e-4);

        // h = 0 <= g = 1 and h <= 2h for positive h: ordered images.
        GridFunction zero = GridFunction::constant(64, 64, 0.0);
        GridFunction one = GridFunction::constant(64, 64, 1.0);
        CHECK(apply_M(zero, p, 1e-9) <= apply_M(one, p, 1e-9));
    }
    TrianglePoint q(0.37, 0.21);
    double m1 = apply_M(hs, q, 1e-9);
    GridFunction doubled =
        GridFunction::sample(256, 256, [](double x, double u) { return 2.0 / (1.0 + u * x); });
    // The adaptive window shifts with the grid's scale, so homogeneity holds
    // to the tail budget rather than roundoff.
    CHECK(std::abs(apply_M(doubled, q, 1e-9) - 2.0 * m1) < 2e-9);
}

TEST_CASE("bilinear interpolation is exact on bilinear data") {
    GridFunction g = GridFunction::sample(
        32, 48, [](double x, double u) { return 2.0 + 3.0 * x - 1.5 * u + 0.75 * x * u; });
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i) {
        double x = 0.02 + 0.96 * uniform01(rng);
        double u = 0.02 + 0.96 * uniform01(rng);
        double ref = 2.0 + 3.0 * x - 1.5 * u + 0.75 * x * u;
        CHECK(std::abs(g.interpolate(x, u) - ref) < 1e-13);
    }
}

TEST_CASE("duality: fixed point over the x > 0.1 band, zero function, bump in cell 0") {
    auto [lhs, rhs] = duality_check(BanachFunction::fixed_point(), Rect{0.1, 1.0, 0.0, 1.0}, 1e-8);
    CHECK(std::abs(lhs - rhs) < 1e-6);

    auto [zl, zr] = duality_check(BanachFunction::zero(), Rect{0.1, 1.0, 0.0, 1.0}, 1e-8);
    CHECK(zl == 0.0);
    CHECK(zr == 0.0);

    BanachFunction bump = BanachFunction::bump(0.6, 0.35, 0.04);
    auto [bl, br] = duality_check(bump, Rect{0.3, 0.9, 0.05, 0.6}, 1e-8);
    CHECK(std::abs(bl - br) < 1e-6);
    CHECK(bl > 0.0);
}

TEST_CASE("sweeps are deterministic across thread counts") {
    setenv("TRIMAP_THREADS", "3", 1);
    auto threaded = power_iteration(64, 64, 40, 1e-10, GridFunction::constant(64, 64, 1.0));
    setenv("TRIMAP_THREADS", "1", 1);
    auto serial = power_iteration(64, 64, 40, 1e-10, GridFunction::constant(64, 64, 1.0));
    unsetenv("TRIMAP_THREADS");
    CHECK(threaded.report.iterations == serial.report.iterations);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) CHECK(threaded.h.at(i, j) == serial.h.at(i, j));
}

TEST_CASE("grid export and spectral report serialize") {
    GridFunction g = GridFunction::constant(8, 8, 1.0);
    std::ostringstream os;
    g.export_csv(os);
    CHECK(os.str().rfind("x,u,h\n", 0) == 0);

    auto res = power_iteration(16, 16, 40, 1e-9, GridFunction::constant(16, 16, 1.0));
    std::string j = spectral_json(res.report, false);
    CHECK(j.find("eigenvalue_estimate") != std::string::npos);
    CHECK(j.find("timestamp") == std::string::npos);
}
