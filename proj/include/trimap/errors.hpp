#pragma once

#include <stdexcept>
#include <string>

namespace trimap {

// Rejected input: a point outside the open domain, a malformed argument, a
// violated precondition.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A quadrature or series evaluation that could not reach the requested
// tolerance.  Carries the best value reached and the error bound achieved so
// callers can decide whether the partial answer is still usable.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved_value, double achieved_bound)
        : std::runtime_error(what), achieved_value(achieved_value), achieved_bound(achieved_bound) {}
    double achieved_value;
    double achieved_bound;
};

// Branch-sum truncation exceeded its term budget (x too small for the
// requested tolerance).  Carries the partial sum and the certified bound on
// what was dropped.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double partial_value, double tail_bound)
        : std::runtime_error(what), partial_value(partial_value), tail_bound(tail_bound) {}
    double partial_value;
    double tail_bound;
};

// Power iteration drifted instead of converging.
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace trimap
