#pragma once

#include "dcfl/flcore/experiment.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dcfl::cli {

inline constexpr const char* kRoundsHeader =
    "round,session,method,global_accuracy,encountered_accuracy,mean_train_loss,synthetic_fidelity_kl,wall_time_s";

inline constexpr const char* kSummaryHeader =
    "method,scenario,clients,delta,seed,rounds,final_accuracy,final_encountered_accuracy,mean_accuracy,"
    "total_wall_time_s";

struct RunSummary {
    flcore::Method method = flcore::Method::FedAvg;
    data::Scenario scenario = data::Scenario::ClassIncIID;
    int clients = 0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    int rounds = 0;
    double final_accuracy = 0.0;
    double final_encountered_accuracy = 0.0;
    double mean_accuracy = 0.0;
    double total_wall_time_s = 0.0;
};

RunSummary summarize(const flcore::ExperimentConfig& config, std::span<const flcore::RoundRecord> records);

/// Fixed-point with six decimals, `.` separator regardless of locale.
std::string format_real(double value);

std::string rounds_csv(std::span<const flcore::RoundRecord> records);
std::string summary_row(const RunSummary& summary);
std::string summary_csv(const RunSummary& summary);

/// Blanks the wall_time_s column of a rounds.csv body so that two runs can
/// be compared byte for byte.
std::string mask_wall_time(const std::string& rounds_csv_text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace dcfl::cli
