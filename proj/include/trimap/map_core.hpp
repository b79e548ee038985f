#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trimap/errors.hpp"
#include "trimap/rational.hpp"

namespace trimap {

// A point of the open domain {(x, y) : 1 > x > y > 0}.  Constructors reject
// anything on or outside the boundary.
struct TrianglePoint {
    TrianglePoint(double x, double y);
    double x;
    double y;
};

// Exact-rational shadow of TrianglePoint, for drift-free expansion.
struct RationalTrianglePoint {
    RationalTrianglePoint(Rational x, Rational y);
    Rational x;
    Rational y;
    TrianglePoint to_double() const { return TrianglePoint(x.to_double(), y.to_double()); }
};

// Digit string of a point.  `terminated` is set when iteration reached the
// boundary (image second coordinate 0, or equal coordinates): the sequence is
// defined only while iterates stay in the open domain, so this is a signal,
// not a failure.
struct TriangleSequence {
    std::vector<std::int64_t> digits;
    bool terminated = false;
};

// Digit classification with the near-boundary diagnostic.  `near_boundary`
// means the defining residual 1-x-ky (or its successor) was within 1e-14 of
// zero and the digit was settled by compensated arithmetic.
struct DigitInfo {
    std::int64_t k;
    bool near_boundary;
};

DigitInfo classify_digit_ex(const TrianglePoint& p);

// The unique k with 1-x-ky >= 0 > 1-x-(k+1)y, i.e. floor((1-x)/y).
std::int64_t classify_digit(const TrianglePoint& p);
std::int64_t classify_digit(const RationalTrianglePoint& p);

// One application of the map.  `image` is empty when the orbit hit the
// boundary; `near_boundary` propagates the classification flag.
struct StepResult {
    std::int64_t digit;
    std::optional<TrianglePoint> image;
    bool near_boundary;
};
struct RationalStepResult {
    std::int64_t digit;
    std::optional<RationalTrianglePoint> image;
};

StepResult step(const TrianglePoint& p);
RationalStepResult step(const RationalTrianglePoint& p);

// First n_max digits (fewer if the orbit terminates).
TriangleSequence expand_sequence(const TrianglePoint& p, int n_max);
TriangleSequence expand_sequence(const RationalTrianglePoint& p, int n_max);

// k-th inverse branch (1/(1+kx+y), x/(1+kx+y)); lands in the k-th cell.
TrianglePoint inverse_branch(std::int64_t k, const TrianglePoint& p);
RationalTrianglePoint inverse_branch(std::int64_t k, const RationalTrianglePoint& p);

// Determinant of the derivative of the map, 1/x^3 on every cell.
double jacobian_det(const TrianglePoint& p);

// Central-difference determinant of the 2x2 derivative of step, for
// cross-checking jacobian_det away from cell boundaries.
double jacobian_det_fd(const TrianglePoint& p, double h);

} // namespace trimap
