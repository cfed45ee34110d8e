#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ccr {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the acceptance criteria (all of them, or the listed ids only) and
// returns one result per criterion. Failures are report entries, not errors.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {}, int workers = 2);

// Prints one pass/fail line per criterion; returns the number of failures.
int print_acceptance_report(std::ostream& out, const std::vector<CriterionResult>& results);

} // namespace ccr
