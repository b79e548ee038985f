#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "trimap/domain_geometry.hpp"
#include "trimap/map_core.hpp"

namespace trimap {

// The invariant probability density 12 / (pi^2 x (1+y)).
double invariant_density(const TrianglePoint& p);

// Closed-form digit probability P(k): dilogarithms plus logarithms, evaluated
// in a cancellation-free rearrangement (identical algebraically to the direct
// form; see tests).
double analytic_P(std::int64_t k);

// The same probability as a 2D quadrature of the invariant density over the
// k-th cell, using the explicit iterated limits (independent oracle for
// analytic_P).
double numeric_P(std::int64_t k, double tol);

// Invariant measure of the region where the digit is >= k (closes the
// partition: sum_{j<k} P(j) + mu_digit_ge(k) = 1).
double mu_digit_ge(std::int64_t k, double tol);

struct FrequencyReport {
    std::int64_t k_max = 0;
    std::vector<double> analytic;
    std::vector<double> numeric;
    std::vector<double> empirical;
    double analytic_overflow = 0.0;  // 1 - sum of listed analytic rows
    double numeric_overflow = 0.0;
    double empirical_overflow = 0.0; // observed frequency of digits > k_max
    std::int64_t orbit_length = 0;
    std::int64_t steps_taken = 0;
    std::string seed_description;
    std::int64_t excluded_steps = 0; // near-boundary classifications flagged
    bool terminated = false;
    std::int64_t termination_index = -1;
    bool degenerate_seed_warning = false;
    int schema_version = 1;
};

// Digit tallies along an n-step double-precision orbit.  Near-boundary
// classifications are flagged and counted but still tallied, so frequencies
// always sum to the number of steps taken.
FrequencyReport empirical_frequencies(const TrianglePoint& seed, std::int64_t n,
                                      std::int64_t k_max);

// Full three-column table (analytic / numeric / empirical) for the CLI.
FrequencyReport build_frequency_table(const TrianglePoint& seed, std::int64_t n,
                                      std::int64_t k_max, double tol);

// mu(A) against mu(T^-1 A) = sum_k mu(t_k(A)): direct quadrature versus
// per-branch image quadratures with an Euler-Maclaurin tail over the branch
// index.  Throws TruncationError if the tail bound exceeds tol/2.
std::pair<double, double> invariance_check(const Rect& region, double tol);

// Rejection sampler for the invariant density restricted to x > 1e-3
// (proposal uniform in (x, y/x), acceptance 1/(1+y)).
TrianglePoint sample_invariant_density(std::mt19937_64& rng);

} // namespace trimap
