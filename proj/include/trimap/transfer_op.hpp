#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "trimap/domain_geometry.hpp"
#include "trimap/map_core.hpp"

namespace trimap {

// Truncated power series of the Banach coordinate h(xi, u) in xi at fixed u,
// valid on [0, xi_max], with a certified bound on the truncation remainder.
// This is what lets branch sums carry certified tails: beyond the explicit
// window every branch image lies on the line u' = x with xi below xi_max, so
// the tail collapses to Hurwitz-zeta values.
struct LineSeries {
    std::vector<double> coeff;
    double remainder_bound = 0.0;
    double xi_max = 0.0;
};

// A member of the weighted space V: a function f on the triangle with
// sup |x f(x,y)| finite.  Everything is carried in the bounded Banach
// coordinate h(x, u) = x * f(x, u x) over the unit square (y = u x).
class BanachFunction {
public:
    using Height = std::function<double(double, double)>;
    using LineModel = std::function<LineSeries(double u, double xi_max)>;

    static BanachFunction from_height(std::string name, Height h, double bound,
                                      LineModel model = {});
    // The eigenfunction 1/(x(1+y)); h = 1/(1 + u x).
    static BanachFunction fixed_point();
    // f = 1/x; h = 1.
    static BanachFunction reciprocal_x();
    static BanachFunction zero();
    // h(x, u) = sum_{a,b} c[a][b] x^a u^b (exact line model; remainder 0).
    static BanachFunction polynomial(std::string name, std::vector<std::vector<double>> coeffs);
    // Smooth bump supported strictly inside cell 0, vanishing outside
    // [cx - r, cx + r] x [cy - r, cy + r].
    static BanachFunction bump(double cx, double cy, double r);

    double height(double x, double u) const { return height_(x, u); }
    double value(const TrianglePoint& p) const { return height_(p.x, p.y / p.x) / p.x; }
    double bound() const { return bound_; }
    bool has_line_model() const { return static_cast<bool>(line_model_); }
    LineSeries line_series(double u, double xi_max) const;
    const std::string& name() const { return name_; }

private:
    BanachFunction(std::string name, Height h, double bound, LineModel model)
        : name_(std::move(name)), height_(std::move(h)), bound_(bound),
          line_model_(std::move(model)) {}
    std::string name_;
    Height height_;
    double bound_;
    LineModel line_model_;
};

struct ApplyResult {
    double value;
    double tail_bound;
    std::int64_t terms;
};

// Transfer operator application, sum over inverse branches of
// (1+nx+y)^-3 f(1/(1+nx+y), x/(1+nx+y)): an explicit window plus a certified
// tail.  With a line model the tail is the series-in-xi evaluated through
// Hurwitz zeta; without one the classical integral-comparison bound
// C/(x(1+y+Mx)) picks M, and a TruncationError carries the partial sum when
// that M exceeds the term budget.
ApplyResult apply_L_ex(const BanachFunction& f, const TrianglePoint& p, double tol);
double apply_L(const BanachFunction& f, const TrianglePoint& p, double tol);

// Conjugated (Banach-coordinate) operator (M h)(x,y) = x sum (1+nx+y)^-2 h(..);
// fixed point 1/(1+y).
double apply_M(const BanachFunction& f, const TrianglePoint& p, double tol);

// Function on the unit square in square coordinates (x, u), cell-centered,
// bilinear interpolation; carrier for power iteration.
class GridFunction {
public:
    GridFunction(int n_x, int n_u);
    static GridFunction constant(int n_x, int n_u, double value);
    static GridFunction sample(int n_x, int n_u, const std::function<double(double, double)>& h);
    static GridFunction random_positive(int n_x, int n_u, std::uint64_t seed);

    int n_x() const { return nx_; }
    int n_u() const { return nu_; }
    double x_center(int i) const { return (i + 0.5) / nx_; }
    double u_center(int j) const { return (j + 0.5) / nu_; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * nu_ + j]; }
    double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * nu_ + j]; }

    double interpolate(double x, double u) const;
    // line[l] = h(x-center l, u), interpolated across u only.
    void fill_line(double u, std::vector<double>& line) const;
    double mean() const;
    double max_abs() const;
    void export_csv(std::ostream& os) const;

private:
    int nx_;
    int nu_;
    std::vector<double> v_;
};

double apply_M(const GridFunction& h, const TrianglePoint& p, double tol = 1e-9);

// sup |h|: exact over grid values, sampled (dense cell-centered grid, a lower
// bound of the true sup) for the analytic flavor.
double banach_norm(const GridFunction& h);
double banach_norm(const BanachFunction& f, int resolution = 400);

// Sampled operator-norm ratio ||Lf|| / ||f||; passes iff <= 3 + 1e-9.
struct NormBoundResult {
    double ratio;
    bool pass;
};
NormBoundResult norm_bound_check(const BanachFunction& f, int sample_count,
                                 std::uint64_t seed = 12345);

struct SpectralReport {
    double eigenvalue_estimate = 0.0;
    double residual_sup = 0.0;
    double gap_estimate = 0.0;
    int iterations = 0;
    std::vector<double> history;          // sup-change per sweep
    std::vector<double> renorm_factors;   // per-sweep eigenvalue estimates
    int n_x = 0;
    int n_u = 0;
    std::string restriction =
        "grid spans (0,1)^2 in square coordinates; pointwise operator claims quoted for x >= 0.02";
};

struct PowerIterationResult {
    SpectralReport report;
    GridFunction h;
};

// Iterates h <- M h, renormalizing to grid average 1 each sweep; the
// renormalization factor estimates the leading eigenvalue.  Stops when the
// successive sup-difference drops below tol.  residual_sup compares the
// converged grid against 1/(1+ux) after matching normalization.
PowerIterationResult power_iteration(int n_x, int n_u, int max_iters, double tol,
                                     const GridFunction& start);

// Both sides of int_A L f dx dy = int_{T^-1 A} f dx dy: the left by quadrature
// of apply_L over A, the right by per-branch quadrature over the inverse-branch
// image polygons plus a certified series tail.
std::pair<double, double> duality_check(const BanachFunction& f, const Rect& region, double tol);

// Shared with statistics: sum_{n >= n_begin} s^-2 h(1/s, x) for a line series,
// evaluated through Hurwitz zeta.  Returns {value, remainder_bound}.
std::pair<double, double> branch_series_tail(const LineSeries& series, double x, double y,
                                             std::int64_t n_begin);

} // namespace trimap
