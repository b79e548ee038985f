#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "trimap/quadrature.hpp"

namespace trimap {

// Axis-aligned rectangle, intersected with the open triangle domain wherever
// it is used as an integration region.
struct Rect {
    double x0;
    double x1;
    double y0;
    double y1;
};

namespace geometry {

// Sutherland-Hodgman clip of a convex polygon against a*x + b*y <= c.
inline std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, double a, double b,
                                          double c) {
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        double fp = a * p.x + b * p.y - c;
        double fq = a * q.x + b * q.y - c;
        if (fp <= 0.0) out.push_back(p);
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            double t = fp / (fp - fq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return out;
}

inline double polygon_area(const std::vector<Point2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % poly.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(s);
}

// Rectangle cut down to { 1 > x > y > 0 }: at most a pentagon.
inline std::vector<Point2> rect_in_triangle(const Rect& r) {
    std::vector<Point2> poly = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    poly = clip_halfplane(poly, -1.0, 1.0, 0.0); // y <= x
    if (poly.empty()) return poly;
    poly = clip_halfplane(poly, 1.0, 0.0, 1.0);  // x <= 1
    if (poly.empty()) return poly;
    poly = clip_halfplane(poly, 0.0, -1.0, 0.0); // y >= 0
    return poly;
}

// Image of a polygon under the k-th inverse branch.  The branch is projective,
// so segments map to segments and vertices carry the whole region.
inline std::vector<Point2> inverse_branch_polygon(std::int64_t k, const std::vector<Point2>& poly) {
    std::vector<Point2> out;
    out.reserve(poly.size());
    for (const Point2& p : poly) {
        double d = 1.0 + static_cast<double>(k) * p.x + p.y;
        out.push_back({1.0 / d, p.x / d});
    }
    return out;
}

} // namespace geometry
} // namespace trimap
