#pragma once

#include <array>
#include <functional>
#include <vector>

#include "trimap/errors.hpp"

namespace trimap {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on the Legendre recurrence.
class GaussLegendre {
public:
    explicit GaussLegendre(int order);
    static const GaussLegendre& order16();
    static const GaussLegendre& order32();

    int order() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            sum += weights_[i] * f(mid + half * nodes_[i]);
        return half * sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

// Adaptive 1D integration by 16/32-point comparison with bisection.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth = 24);

// Same rule, but carrying the accumulated leaf error estimate so callers can
// enforce an accuracy contract (the plain flavor is silently best-effort).
struct AdaptiveResult {
    double value;
    double err_estimate;
};
AdaptiveResult integrate_adaptive_ex(const std::function<double(double)>& f, double a, double b,
                                     double tol, int max_depth = 24);

// Fixed nodes/weights approximating integration against dm(t) = t/(e^t - 1) dt
// on (0, T]: geometric panels [0,1], [1,2], [2,4], ... with 32-point
// Gauss-Legendre each.  The weight factor is folded into the weights.
struct DmQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    double t_cutoff = 0.0;
    double declared_tolerance = 0.0;

    static DmQuadrature build(double tol, double t_max = 4096.0);

    template <typename F>
    double integrate(F&& f) const {
        double sum = 0.0, comp = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double term = weights[i] * f(nodes[i]);
            double t = sum + term;
            comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        }
        return sum + comp;
    }
};

struct DmIntegral {
    double value;
    double tail_bound;
    double t_cutoff;
    int panels;
};

// Integral of f against dm(t) = t/(e^t - 1) dt over (0, inf) to absolute
// accuracy tol.  Panels grow geometrically until both the panel contribution
// and the analytic tail bound (with growth envelope |f| <= F e^{t/2} estimated
// from samples past the cutoff) fall below tol.  Throws AccuracyError carrying
// the achieved estimate if the panel budget runs out.
DmIntegral integrate_dm_ex(const std::function<double(double)>& f, double tol);
double integrate_dm(const std::function<double(double)>& f, double tol);

// Same panel scheme for int_0^inf g(t) dt where g already carries its own
// decay (used where the factored f * weight form would overflow doubles).
DmIntegral integrate_halfline_ex(const std::function<double(double)>& g, double tol);

// ---------------------------------------------------------------------------
// 2D regions

// Iterated integral over { (x, y) : a <= x <= b, ylo(x) <= y <= yhi(x) } with
// an adaptive outer rule and 32-point inner panels.
double integrate_region(const std::function<double(double, double)>& f, double a, double b,
                        const std::function<double(double)>& ylo,
                        const std::function<double(double)>& yhi, double tol);

// Error-carrying flavor for callers with an accuracy contract.
AdaptiveResult integrate_region_ex(const std::function<double(double, double)>& f, double a,
                                   double b, const std::function<double(double)>& ylo,
                                   const std::function<double(double)>& yhi, double tol);

struct Point2 {
    double x;
    double y;
};

// Iterated adaptive integral of f over (x0,x1)x(y0,y1) intersected with the
// open triangle 1 > x > y > 0.  The outer rule is split at the yhi kink.
double integrate_rect_in_triangle(const std::function<double(double, double)>& f, double x0,
                                  double x1, double y0, double y1, double tol);

// Integral of f over a convex polygon (vertices in order), by fan
// triangulation and a tensor Duffy rule per triangle with uniform refinement.
double integrate_polygon(const std::function<double(double, double)>& f,
                         const std::vector<Point2>& vertices, int refine = 1);

// Same, but each fan triangle is refined by midpoint quadrisection until the
// coarse/fine comparison meets tol; handles integrands with sharp variation
// near one vertex (thin branch-image slivers).
double integrate_polygon_adaptive(const std::function<double(double, double)>& f,
                                  const std::vector<Point2>& vertices, double tol,
                                  int max_depth = 14);

} // namespace trimap
