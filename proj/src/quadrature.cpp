#include "trimap/quadrature.hpp"

#include <cmath>
#include <limits>

namespace trimap {

GaussLegendre::GaussLegendre(int order) {
    nodes_.resize(static_cast<std::size_t>(order));
    weights_.resize(static_cast<std::size_t>(order));
    const int m = (order + 1) / 2;
    for (int i = 1; i <= m; ++i) {
        double z = std::cos(M_PI * (i - 0.25) / (order + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        nodes_[static_cast<std::size_t>(i - 1)] = -z;
        nodes_[static_cast<std::size_t>(order - i)] = z;
        weights_[static_cast<std::size_t>(i - 1)] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights_[static_cast<std::size_t>(order - i)] = weights_[static_cast<std::size_t>(i - 1)];
    }
}

const GaussLegendre& GaussLegendre::order16() {
    static const GaussLegendre g(16);
    return g;
}

const GaussLegendre& GaussLegendre::order32() {
    static const GaussLegendre g(32);
    return g;
}

namespace {

double integrate_adaptive_impl(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth, double* err_acc) {
    double coarse = GaussLegendre::order16().integrate(f, a, b);
    double fine = GaussLegendre::order32().integrate(f, a, b);
    // The relative floor keeps roundoff on large-magnitude integrands from
    // forcing full-depth recursion that can never converge.
    double gap = std::abs(fine - coarse);
    if (gap <= tol + 4e-15 * std::abs(fine) || depth <= 0) {
        if (err_acc != nullptr) *err_acc += gap + 2e-16 * std::abs(fine);
        return fine;
    }
    double mid = 0.5 * (a + b);
    return integrate_adaptive_impl(f, a, mid, 0.5 * tol, depth - 1, err_acc) +
           integrate_adaptive_impl(f, mid, b, 0.5 * tol, depth - 1, err_acc);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
    if (!(b >= a)) throw DomainError("integrate_adaptive: inverted interval");
    if (a == b) return 0.0;
    return integrate_adaptive_impl(f, a, b, tol, max_depth, nullptr);
}

AdaptiveResult integrate_adaptive_ex(const std::function<double(double)>& f, double a, double b,
                                     double tol, int max_depth) {
    if (!(b >= a)) throw DomainError("integrate_adaptive: inverted interval");
    if (a == b) return {0.0, 0.0};
    double err = 0.0;
    double value = integrate_adaptive_impl(f, a, b, tol, max_depth, &err);
    return {value, err};
}

namespace {

// t/(e^t - 1): stable for all t > 0; the t -> 0 limit is 1 but panel nodes
// never sit at 0.
double dm_weight(double t) { return t / std::expm1(t); }

} // namespace

DmQuadrature DmQuadrature::build(double tol, double t_max) {
    DmQuadrature q;
    q.declared_tolerance = tol;
    const GaussLegendre& gl = GaussLegendre::order32();
    double lo = 0.0, hi = 1.0;
    while (lo < t_max) {
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < gl.order(); ++i) {
            double t = mid + half * gl.nodes()[static_cast<std::size_t>(i)];
            q.nodes.push_back(t);
            q.weights.push_back(half * gl.weights()[static_cast<std::size_t>(i)] * dm_weight(t));
        }
        lo = hi;
        hi = 2.0 * hi;
        // Past this point the dm mass alone is below tol: mass(T,inf) ~ (T+1)e^{-T}.
        if ((lo + 1.0) * std::exp(-lo) < tol * 1e-3) break;
    }
    q.t_cutoff = lo;
    return q;
}

DmIntegral integrate_dm_ex(const std::function<double(double)>& f, double tol) {
    if (!(tol > 0.0)) throw DomainError("integrate_dm: tol must be > 0");
    const GaussLegendre& gl = GaussLegendre::order32();
    auto integrand = [&f](double t) { return f(t) * dm_weight(t); };

    double sum = 0.0;
    double lo = 0.0, hi = 1.0;
    int panels = 0;
    const int max_panels = 64; // reaches t ~ 2^63; budget is effectively time
    double panel = 0.0, prev_abs = 0.0;
    double sup_f = 0.0;
    while (panels < max_panels) {
        // Refinement comparison per panel keeps oscillatory integrands honest.
        double coarse = GaussLegendre::order16().integrate(integrand, lo, hi);
        panel = gl.integrate(integrand, lo, hi);
        if (std::abs(panel - coarse) > 0.25 * tol + 4e-15 * std::abs(panel)) {
            double mid = 0.5 * (lo + hi);
            panel = integrate_adaptive(integrand, lo, mid, 0.125 * tol) +
                    integrate_adaptive(integrand, mid, hi, 0.125 * tol);
        }
        if (!std::isfinite(panel))
            throw AccuracyError("integrate_dm: integrand left double range", sum,
                                std::numeric_limits<double>::infinity());
        sum += panel;
        ++panels;
        // Growth envelope |f(t)| <= F e^{eps t} on [hi, inf) with eps < 1
        // estimated from endpoint samples (x4 safety); never trusted before
        // t = 32 or while panel masses are still growing, so integrands whose
        // mass sits far from the origin are not cut off early.
        double f_hi = std::abs(f(hi));
        double f_mid = std::abs(f(0.5 * (lo + hi)));
        sup_f = std::max(f_hi, f_mid);
        double eps = 0.0;
        if (f_hi > 0.0 && f_mid > 0.0)
            eps = std::clamp(std::log(f_hi / f_mid) / (0.5 * (hi - lo)), 0.0, 0.9);
        double F = 4.0 * sup_f * std::exp(-eps * hi);
        double decay = 1.0 - eps;
        double tail = F * (hi / decay + 1.0 / (decay * decay)) * std::exp(-decay * hi) /
                      (1.0 - std::exp(-std::min(hi, 700.0)));
        bool settled = hi >= 32.0 && std::abs(panel) <= prev_abs;
        if (settled && tail < 0.1 * tol && std::abs(panel) < 0.1 * tol)
            return {sum, tail, hi, panels};
        prev_abs = std::abs(panel);
        lo = hi;
        hi = (hi < 2.0) ? hi + 1.0 : 2.0 * hi;
        if (hi > 1e18) break;
    }
    throw AccuracyError("integrate_dm: tolerance not reached within panel budget", sum,
                        std::abs(panel) + sup_f);
}

double integrate_dm(const std::function<double(double)>& f, double tol) {
    return integrate_dm_ex(f, tol).value;
}

DmIntegral integrate_halfline_ex(const std::function<double(double)>& g, double tol) {
    if (!(tol > 0.0)) throw DomainError("integrate_halfline: tol must be > 0");
    const GaussLegendre& gl = GaussLegendre::order32();
    double sum = 0.0;
    double lo = 0.0, hi = 1.0;
    int panels = 0;
    const int max_panels = 64;
    double panel = 0.0, prev_abs = 0.0;
    while (panels < max_panels) {
        double coarse = GaussLegendre::order16().integrate(g, lo, hi);
        panel = gl.integrate(g, lo, hi);
        if (std::abs(panel - coarse) > 0.25 * tol + 4e-15 * std::abs(panel)) {
            double mid = 0.5 * (lo + hi);
            panel = integrate_adaptive(g, lo, mid, 0.125 * tol) +
                    integrate_adaptive(g, mid, hi, 0.125 * tol);
        }
        if (!std::isfinite(panel))
            throw AccuracyError("integrate_halfline: integrand left double range", sum,
                                std::numeric_limits<double>::infinity());
        sum += panel;
        ++panels;
        // Decay-rate envelope straight off the integrand.
        double g_hi = std::abs(g(hi));
        double g_mid = std::abs(g(0.5 * (lo + hi)));
        double delta = 0.05;
        if (g_hi > 0.0 && g_mid > 0.0)
            delta = std::max(0.05, std::log(g_mid / g_hi) / (0.5 * (hi - lo)));
        double tail = 8.0 * std::max(g_hi, g_mid * std::exp(-delta * 0.5 * (hi - lo))) / delta;
        bool settled = hi >= 32.0 && std::abs(panel) <= prev_abs;
        if (settled && tail < 0.1 * tol && std::abs(panel) < 0.1 * tol)
            return {sum, tail, hi, panels};
        prev_abs = std::abs(panel);
        lo = hi;
        hi = (hi < 2.0) ? hi + 1.0 : 2.0 * hi;
        if (hi > 1e18) break;
    }
    throw AccuracyError("integrate_halfline: tolerance not reached within panel budget", sum,
                        std::abs(panel));
}

namespace {

std::function<double(double)> region_outer(const std::function<double(double, double)>& f,
                                           const std::function<double(double)>& ylo,
                                           const std::function<double(double)>& yhi) {
    return [&f, &ylo, &yhi](double x) {
        double y0 = ylo(x), y1 = yhi(x);
        if (!(y1 > y0)) return 0.0;
        return GaussLegendre::order32().integrate([&f, x](double y) { return f(x, y); }, y0, y1);
    };
}

} // namespace

double integrate_region(const std::function<double(double, double)>& f, double a, double b,
                        const std::function<double(double)>& ylo,
                        const std::function<double(double)>& yhi, double tol) {
    if (!(b > a)) return 0.0;
    return integrate_adaptive(region_outer(f, ylo, yhi), a, b, tol);
}

AdaptiveResult integrate_region_ex(const std::function<double(double, double)>& f, double a,
                                   double b, const std::function<double(double)>& ylo,
                                   const std::function<double(double)>& yhi, double tol) {
    if (!(b > a)) return {0.0, 0.0};
    AdaptiveResult r = integrate_adaptive_ex(region_outer(f, ylo, yhi), a, b, tol);
    // The fixed inner rule contributes at the roundoff scale of the value.
    r.err_estimate += 2e-15 * std::abs(r.value);
    return r;
}

double integrate_rect_in_triangle(const std::function<double(double, double)>& f, double x0,
                                  double x1, double y0, double y1, double tol) {
    double a = std::max({x0, y0, 0.0});
    double b = std::min(x1, 1.0);
    if (!(b > a)) return 0.0;
    auto lo = [y0](double) { return std::max(y0, 0.0); };
    auto hi_x = [y1](double x) { return std::min(y1, x); };
    // yhi switches from x to y1 at x = y1; split the outer rule there.
    double split = std::clamp(y1, a, b);
    double left = (split > a)
                      ? integrate_region(f, a, split, lo, [](double x) { return x; }, 0.5 * tol)
                      : 0.0;
    double right = (b > split) ? integrate_region(f, split, b, lo, hi_x, 0.5 * tol) : 0.0;
    return left + right;
}

namespace {

double integrate_triangle(const std::function<double(double, double)>& f, Point2 a, Point2 b,
                          Point2 c, int n_split) {
    // Subdivide the reference triangle uniformly, Duffy-map each cell to the
    // 16-point tensor square.
    const GaussLegendre& gl = GaussLegendre::order16();
    double jac2 = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    double total = 0.0;
    double h = 1.0 / n_split;
    for (int iu = 0; iu < n_split; ++iu) {
        for (int iv = 0; iv + iu < n_split; ++iv) {
            // Lower and (possibly) upper sub-triangles of cell (iu, iv).
            std::array<std::array<Point2, 3>, 2> subs;
            int count = 1;
            double u0 = iu * h, v0 = iv * h;
            subs[0] = {Point2{u0, v0}, Point2{u0 + h, v0}, Point2{u0, v0 + h}};
            if (iu + iv + 2 <= n_split) {
                subs[1] = {Point2{u0 + h, v0}, Point2{u0 + h, v0 + h}, Point2{u0, v0 + h}};
                count = 2;
            }
            for (int s = 0; s < count; ++s) {
                const auto& t = subs[static_cast<std::size_t>(s)];
                for (int i = 0; i < gl.order(); ++i) {
                    double p = 0.5 * (1.0 + gl.nodes()[static_cast<std::size_t>(i)]);
                    double wp = 0.5 * gl.weights()[static_cast<std::size_t>(i)];
                    for (int j = 0; j < gl.order(); ++j) {
                        double qq = 0.5 * (1.0 + gl.nodes()[static_cast<std::size_t>(j)]);
                        double wq = 0.5 * gl.weights()[static_cast<std::size_t>(j)];
                        // Duffy: (p, q) -> (p(1-q), p q) collapses the square
                        // onto the triangle {u, v >= 0, u + v <= 1}, Jacobian p.
                        double uu = p * (1.0 - qq), vv = p * qq;
                        double ru = t[0].x + (t[1].x - t[0].x) * uu + (t[2].x - t[0].x) * vv;
                        double rv = t[0].y + (t[1].y - t[0].y) * uu + (t[2].y - t[0].y) * vv;
                        double X = a.x + (b.x - a.x) * ru + (c.x - a.x) * rv;
                        double Y = a.y + (b.y - a.y) * ru + (c.y - a.y) * rv;
                        total += wp * wq * p * h * h * f(X, Y);
                    }
                }
            }
        }
    }
    return total * std::abs(jac2);
}

} // namespace

double integrate_polygon(const std::function<double(double, double)>& f,
                         const std::vector<Point2>& vertices, int refine) {
    if (vertices.size() < 3) return 0.0;
    double total = 0.0;
    for (std::size_t i = 1; i + 1 < vertices.size(); ++i)
        total += integrate_triangle(f, vertices[0], vertices[i], vertices[i + 1], refine);
    return total;
}

namespace {

Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

double integrate_triangle_adaptive(const std::function<double(double, double)>& f, Point2 a,
                                   Point2 b, Point2 c, double tol, int depth) {
    double coarse = integrate_triangle(f, a, b, c, 1);
    Point2 ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    double fine = integrate_triangle(f, a, ab, ca, 1) + integrate_triangle(f, ab, b, bc, 1) +
                  integrate_triangle(f, ca, bc, c, 1) + integrate_triangle(f, ab, bc, ca, 1);
    if (std::abs(fine - coarse) <= tol || depth <= 0) return fine;
    return integrate_triangle_adaptive(f, a, ab, ca, 0.25 * tol, depth - 1) +
           integrate_triangle_adaptive(f, ab, b, bc, 0.25 * tol, depth - 1) +
           integrate_triangle_adaptive(f, ca, bc, c, 0.25 * tol, depth - 1) +
           integrate_triangle_adaptive(f, ab, bc, ca, 0.25 * tol, depth - 1);
}

} // namespace

double integrate_polygon_adaptive(const std::function<double(double, double)>& f,
                                  const std::vector<Point2>& vertices, double tol, int max_depth) {
    if (vertices.size() < 3) return 0.0;
    double total = 0.0;
    double share = tol / static_cast<double>(vertices.size() - 2);
    for (std::size_t i = 1; i + 1 < vertices.size(); ++i)
        total +=
            integrate_triangle_adaptive(f, vertices[0], vertices[i], vertices[i + 1], share,
                                        max_depth);
    return total;
}

} // namespace trimap
