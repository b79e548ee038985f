#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trimap {

// One verification criterion: an inequality the build must satisfy, with the
// observed value, the pinned threshold, and the wall-clock budget.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double threshold = 0.0;
    double seconds = 0.0;
    double time_limit = 0.0;
    std::string detail;
};

// Runs the ten acceptance criteria at their pinned tolerances.  `progress`
// (when non-null) receives one pass/fail line per criterion as it completes.
// `only` restricts to a single criterion id (0 = all).
std::vector<CriterionResult> run_acceptance_criteria(std::ostream* progress, int only = 0);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace trimap
