#pragma once

#include "dcfl/cli/config_file.hpp"
#include "dcfl/cli/csv.hpp"
#include "dcfl/cli/selftest.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace dcfl::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitRuntimeError = 2,
    kExitSelftestFailure = 3,
};

enum class SweepAxis { Clients, Delta };

/// Output directory after applying the environment override.
std::filesystem::path resolve_output_dir(const RunConfig& config);

struct RunOutputs {
    std::vector<flcore::RoundRecord> records;
    RunSummary summary;
};

/// Prepares data and runs one experiment; no files are written.
RunOutputs execute_run(const RunConfig& config, const flcore::RunOptions& options = {});

/// Throws ConfigError("axis", ...) for anything but clients or delta.
SweepAxis parse_sweep_axis(std::string_view axis);
/// Comma-separated sweep values. Throws ConfigError("values", ...) on
/// malformed, out-of-range or duplicate values.
std::vector<double> parse_sweep_values(SweepAxis axis, std::string_view values);

/// Writes rounds.csv and summary.csv into the output directory.
int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// One run per value; each run's rounds.csv goes to <output>/<axis>_<value>/
/// and the per-value summary rows to <output>/sweep_<axis>.csv.
int cmd_sweep(const std::filesystem::path& config_path, std::string_view axis, std::string_view values,
              std::ostream& out, std::ostream& err);

int cmd_selftest(const SelftestOptions& options, std::ostream& out);

} // namespace dcfl::cli
