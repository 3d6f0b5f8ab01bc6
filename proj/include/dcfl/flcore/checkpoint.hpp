#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/flcore/experiment.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dcfl::flcore {

struct ClientCheckpoint {
    std::vector<double> target_params;
    std::vector<double> diffusion_params;
    std::vector<data::Example> replay_cache;

    friend bool operator==(const ClientCheckpoint&, const ClientCheckpoint&) = default;
};

/// Binary snapshot of a run. Layout (all integers little-endian):
///   "DCFLCKPT" | u32 version | u64 config digest | i32 round
///   | vec global params | u32 client count
///   | per client: vec target | vec diffusion | u64 cache size
///                 | per example: i32 label | i32 domain | vec features
/// where vec = u64 length followed by IEEE-754 doubles as raw 64-bit words.
struct Checkpoint {
    std::uint64_t config_digest = 0;
    int round = 0;
    std::vector<double> global_params;
    std::vector<ClientCheckpoint> clients;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint make_checkpoint(const ExperimentConfig& config, const ExperimentResult& result);

std::string encode_checkpoint(const Checkpoint& checkpoint);
/// Throws FormatError on malformed input and ConfigError("config_digest", ...)
/// when `expected_digest` is given and differs.
Checkpoint decode_checkpoint(const std::string& bytes, std::optional<std::uint64_t> expected_digest = std::nullopt);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> expected_digest = std::nullopt);

} // namespace dcfl::flcore
