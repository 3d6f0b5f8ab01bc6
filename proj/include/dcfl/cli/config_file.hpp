#pragma once

#include "dcfl/data/blobs.hpp"
#include "dcfl/data/dataset.hpp"
#include "dcfl/data/partition.hpp"
#include "dcfl/flcore/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dcfl::cli {

enum class DatasetKind { Blobs, Idx };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::Blobs;
    /// Blob sizes are totals per (class, domain) before the train/test split.
    data::BlobSpec blobs{10, 1, 7500, 2, 4.0, 0.0};
    std::filesystem::path idx_images;
    std::filesystem::path idx_labels;
    /// Side of the average-pooled images; 0 keeps the native 28.
    int idx_side = 0;
    double test_fraction = 0.2;
    /// Session order of the domains (domain-incremental only).
    std::vector<int> domain_order;
};

struct RunConfig {
    flcore::ExperimentConfig experiment;
    DatasetSpec dataset;
    std::filesystem::path output_dir = "dcfl_out";
    int threads = 1;
};

/// Environment variable that overrides output_dir.
inline constexpr const char* kOutputDirEnv = "DCFL_OUTPUT_DIR";

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// ignored; unset keys keep their defaults. Throws ConfigError naming the
/// key on unknown keys, malformed values and constraint violations.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Every recognised key with its default, in file format.
std::string default_config_text();

struct PreparedRun {
    data::Dataset train;
    data::Dataset test;
    data::ClientSchedule schedule;
};

/// Builds (or loads) the dataset, splits it and partitions the training
/// part. Streams: root(seed).split(100) for blobs, split(101) for the split,
/// split(102) for the partition.
PreparedRun prepare_run(const RunConfig& config);

} // namespace dcfl::cli
