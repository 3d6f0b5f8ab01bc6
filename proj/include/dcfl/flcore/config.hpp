#pragma once

#include "dcfl/data/partition.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dcfl::flcore {

enum class Method { DCFL, FedAvg, FedProx, FedAvgEWC, FedAvgLwF };

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);
std::optional<data::Scenario> scenario_from_string(std::string_view name);

/// Everything that shapes one federated run. Defaults follow the reference
/// training recipe (Adam, lr 1e-4, batch 32, E_theta = 5, E_omega = 100).
struct ExperimentConfig {
    data::Scenario scenario = data::Scenario::ClassIncIID;
    Method method = Method::DCFL;

    int clients = 20;
    int sessions = 5;
    int rounds = 100;
    int classes_per_session = 2;

    int epochs_target = 5;
    int epochs_diffusion = 100;
    int batch_size = 32;
    double lr_target = 1e-4;
    double lr_diffusion = 1e-4;

    /// Synthetic-to-real ratio of the replay cache.
    double delta = 1.0;
    int diffusion_steps = 200;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    double mu_prox = 1.0;
    double lambda_ewc = 400.0;
    double lambda_lwf = 1.0;

    std::uint64_t seed = 0;

    int hidden_width = 64;
    int denoiser_hidden = 128;
    int time_embed = 16;
    int cond_embed = 16;

    /// Regenerate the replay cache and retrain the denoiser every round
    /// instead of once per session.
    bool replay_every_round = false;
    /// Clamp generated features to [0, 1] (image data).
    bool clamp_replay = false;

    [[nodiscard]] int rounds_per_session() const noexcept { return rounds / sessions; }

    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// Canonical `key = value` rendering; equal configs render identically.
std::string to_config_text(const ExperimentConfig& config);

/// FNV-1a over to_config_text.
std::uint64_t config_digest(const ExperimentConfig& config);

} // namespace dcfl::flcore
