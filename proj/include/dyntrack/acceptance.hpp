#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dyntrack {

struct CriterionResult {
    int number;
    std::string name;
    bool passed;
    std::string details;
};

struct AcceptanceOptions {
    std::vector<int> only;        // criterion numbers to run; empty = all
    std::uint32_t threads = 0;    // 0 = hardware concurrency
    std::uint64_t seed = 20230811; // the suite is one fixed realization
    std::string scratch_dir;      // replay criterion workspace; empty = temp dir
};

/// Runs the acceptance criteria and prints one pass/fail line per criterion
/// to `log` as they complete.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace dyntrack
