#include "trimap/statistics.hpp"

#include <cmath>

#include "trimap/quadrature.hpp"
#include "trimap/special_fn.hpp"

namespace trimap {

namespace {

constexpr double kPiSq = 9.86960440108935861883449099987615114;

double density_xy(double x, double y) { return 12.0 / (kPiSq * x * (1.0 + y)); }

} // namespace

double invariant_density(const TrianglePoint& p) { return density_xy(p.x, p.y); }

double analytic_P(std::int64_t k) {
    if (k < 0) throw DomainError("analytic_P: k must be >= 0");
    if (k == 0) {
        double l2 = std::log(2.0);
        return 1.0 - (6.0 * dilog(0.25) + 12.0 * l2 * l2) / kPiSq;
    }
    double kp1 = static_cast<double>(k) + 1.0;
    double kp2 = static_cast<double>(k) + 2.0;
    double li = dilog(1.0 / (kp1 * kp1)) - dilog(1.0 / (kp2 * kp2));
    // 4 ln^2(k+1) - 2 ln^2((k+2)/(k+1)) - 2 ln(k(k+2)) ln(k+1)
    //   = -2 ln(k+1) ln(1 - (k+1)^-2) - 2 ln1p(1/(k+1))^2,
    // which costs no cancellation at large k.
    double a = std::log(kp1);
    double q = std::log1p(-1.0 / (kp1 * kp1));
    double r = std::log1p(1.0 / kp1);
    return (6.0 / kPiSq) * (li - 2.0 * a * q - 2.0 * r * r);
}

double numeric_P(std::int64_t k, double tol) {
    if (k < 0) throw DomainError("numeric_P: k must be >= 0");
    if (!(tol > 0.0)) throw DomainError("numeric_P: tol must be > 0");
    AdaptiveResult total{0.0, 0.0};
    auto accumulate = [&total](AdaptiveResult r) {
        total.value += r.value;
        total.err_estimate += r.err_estimate;
    };
    if (k == 0) {
        accumulate(integrate_region_ex(
            density_xy, 0.5, 1.0, [](double x) { return 1.0 - x; }, [](double x) { return x; },
            0.5 * tol));
    } else {
        double kd = static_cast<double>(k);
        accumulate(integrate_region_ex(
            density_xy, 1.0 / (kd + 1.0), 1.0,
            [kd](double x) { return (1.0 - x) / (kd + 1.0); },
            [kd](double x) { return (1.0 - x) / kd; }, 0.5 * tol));
        accumulate(integrate_region_ex(
            density_xy, 1.0 / (kd + 2.0), 1.0 / (kd + 1.0),
            [kd](double x) { return (1.0 - x) / (kd + 1.0); }, [](double x) { return x; },
            0.5 * tol));
    }
    if (total.err_estimate > tol)
        throw AccuracyError("numeric_P: quadrature accuracy not reached", total.value,
                            total.err_estimate);
    return total.value;
}

double mu_digit_ge(std::int64_t k, double tol) {
    if (k <= 0) return 1.0;
    double kd = static_cast<double>(k);
    // Region { y <= min(x, (1-x)/k) }; the inner integral is closed-form
    // smooth, and ln(1+ymax)/x stays bounded as x -> 0.
    auto integrand = [kd](double x) {
        double ymax = std::min(x, (1.0 - x) / kd);
        return 12.0 / (kPiSq * x) * std::log1p(ymax);
    };
    double split = 1.0 / (kd + 1.0);
    return integrate_adaptive(integrand, 0.0, split, 0.5 * tol) +
           integrate_adaptive(integrand, split, 1.0, 0.5 * tol);
}

FrequencyReport empirical_frequencies(const TrianglePoint& seed, std::int64_t n,
                                      std::int64_t k_max) {
    if (n < 0) throw DomainError("empirical_frequencies: n must be >= 0");
    if (k_max < 0) throw DomainError("empirical_frequencies: k_max must be >= 0");
    FrequencyReport rep;
    rep.k_max = k_max;
    rep.orbit_length = n;
    rep.seed_description =
        "(" + std::to_string(seed.x) + ", " + std::to_string(seed.y) + ")";
    std::vector<std::int64_t> tally(static_cast<std::size_t>(k_max) + 1, 0);
    std::int64_t overflow = 0;

    double x = seed.x, y = seed.y;
    std::int64_t steps = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        DigitInfo d = classify_digit_ex(TrianglePoint(x, y));
        if (d.near_boundary) ++rep.excluded_steps;
        if (d.k <= k_max)
            ++tally[static_cast<std::size_t>(d.k)];
        else
            ++overflow;
        ++steps;
        double inv_x = 1.0 / x;
        double r = 1.0 - x - static_cast<double>(d.k) * y;
        double xi = y * inv_x;
        double yi = r * inv_x;
        if (!(yi > 0.0) || !(xi > yi) || !(xi < 1.0)) {
            rep.terminated = true;
            rep.termination_index = steps;
            break;
        }
        x = xi;
        y = yi;
    }
    rep.steps_taken = steps;
    if (rep.terminated && rep.termination_index < 10) rep.degenerate_seed_warning = true;

    // No steps, no observations: the empirical column stays empty rather than
    // reporting zero frequencies.
    if (rep.steps_taken > 0) {
        rep.empirical.resize(static_cast<std::size_t>(k_max) + 1, 0.0);
        for (std::int64_t k = 0; k <= k_max; ++k)
            rep.empirical[static_cast<std::size_t>(k)] =
                static_cast<double>(tally[static_cast<std::size_t>(k)]) /
                static_cast<double>(rep.steps_taken);
        rep.empirical_overflow =
            static_cast<double>(overflow) / static_cast<double>(rep.steps_taken);
    }
    return rep;
}

FrequencyReport build_frequency_table(const TrianglePoint& seed, std::int64_t n,
                                      std::int64_t k_max, double tol) {
    FrequencyReport rep = empirical_frequencies(seed, n, k_max);
    double asum = 0.0, nsum = 0.0;
    for (std::int64_t k = 0; k <= k_max; ++k) {
        double a = analytic_P(k);
        double q = numeric_P(k, tol);
        rep.analytic.push_back(a);
        rep.numeric.push_back(q);
        asum += a;
        nsum += q;
    }
    rep.analytic_overflow = 1.0 - asum;
    rep.numeric_overflow = 1.0 - nsum;
    return rep;
}

std::pair<double, double> invariance_check(const Rect& region, double tol) {
    if (!(tol > 0.0)) throw DomainError("invariance_check: tol must be > 0");
    std::vector<Point2> s = geometry::rect_in_triangle(region);
    if (s.size() < 3 || geometry::polygon_area(s) <= 0.0) return {0.0, 0.0};

    // Quadrature floors: below ~1e-12 the rules only burn time on roundoff,
    // so an infeasible tol must be rejected by the tail bound, not ground out.
    const std::int64_t K = 128;
    const double km = static_cast<double>(K) - 0.5;
    const double quad_tol = std::max(0.05 * tol, 1e-12);

    // Euler-Maclaurin tail over the branch index: the correction term is the
    // cheap part, so the feasibility check runs before any heavy quadrature.
    double fprime = integrate_rect_in_triangle(
        [km](double x, double y) {
            double s0 = 1.0 + km * x + y;
            return -12.0 * x * (2.0 * s0 + x) / (kPiSq * s0 * s0 * (s0 + x) * (s0 + x));
        },
        region.x0, region.x1, region.y0, region.y1, std::max(quad_tol, 1e-11));
    double corr = fprime / 24.0;
    double err_bound = 3.0 * std::abs(corr) / static_cast<double>(K);
    if (err_bound > 0.5 * tol)
        throw TruncationError("invariance_check: branch tail bound exceeds tol/2", 0.0, err_bound);

    double lhs = integrate_rect_in_triangle(density_xy, region.x0, region.x1, region.y0,
                                            region.y1, quad_tol);

    // Branch masses by quadrature over the image polygons (straight-sided,
    // since the inverse branches are projective).
    double rhs = 0.0;
    for (std::int64_t k = 0; k < K; ++k) {
        std::vector<Point2> img = geometry::inverse_branch_polygon(k, s);
        rhs += integrate_polygon_adaptive(density_xy, img,
                                          std::max(0.02 * tol, 2e-13) / static_cast<double>(K));
    }
    // F(kappa) = int_S 12/(pi^2 s (s+x)) dp has a closed-form kappa-integral.
    // The integrand has a 1/K-scale layer in x, hence the adaptive rule.
    double tail_main = integrate_rect_in_triangle(
        [km](double x, double y) {
            double s0 = 1.0 + km * x + y;
            return 12.0 / (kPiSq * x * x) * std::log1p(x / s0);
        },
        region.x0, region.x1, region.y0, region.y1, quad_tol);
    return {lhs, rhs + tail_main + corr};
}

TrianglePoint sample_invariant_density(std::mt19937_64& rng) {
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (;;) {
        double x = 1e-3 + (1.0 - 2e-3) * uniform();
        double u = uniform();
        double y = u * x;
        if (y <= 1e-9 || y >= x * (1.0 - 1e-12)) continue;
        if (uniform() < 1.0 / (1.0 + y)) return TrianglePoint(x, y);
    }
}

} // namespace trimap
