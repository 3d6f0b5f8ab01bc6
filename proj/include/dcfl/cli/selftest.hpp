#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dcfl::cli {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestOptions {
    /// Perturbs the analytic classifier gradient before it is compared,
    /// so the gradient suite must fail.
    bool corrupt_gradient = false;
    std::uint64_t seed = 20240611;
};

std::vector<SuiteResult> run_selftest_suites(const SelftestOptions& options);

/// Prints a pass/fail table; true iff every suite passed.
bool print_selftest_table(const std::vector<SuiteResult>& results, std::ostream& out);

} // namespace dcfl::cli
