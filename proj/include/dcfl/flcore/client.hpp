#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/diffusion/ddpm.hpp"
#include "dcfl/diffusion/schedule.hpp"
#include "dcfl/flcore/config.hpp"
#include "dcfl/models/denoiser.hpp"
#include "dcfl/models/mlp.hpp"
#include "dcfl/numkit/adam.hpp"
#include "dcfl/numkit/rng.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <vector>

namespace dcfl::flcore {

struct LabelKey {
    int label = 0;
    int domain = 0;
    friend auto operator<=>(const LabelKey&, const LabelKey&) = default;
};

struct ClientState {
    int client_id = 0;
    int session = -1;

    models::MlpParams target_params;
    /// Present for DCFL clients only; never leaves the client.
    std::optional<models::DenoiserParams> diffusion_params;
    numkit::AdamState diffusion_opt;
    bool diffusion_trained = false;

    std::vector<data::Example> current_real;
    std::vector<data::Example> replay_cache;

    /// Every (class, domain) pair held so far, current session included.
    std::set<LabelKey> seen_labels;
    /// Pairs held in sessions before the current one; replay draws from these.
    std::set<LabelKey> prior_labels;

    // Baseline state, refreshed at every session boundary.
    std::optional<models::MlpParams> ewc_anchor;
    std::vector<double> ewc_fisher;
    std::optional<models::MlpParams> lwf_teacher;

    /// Fidelity of the current replay cache against this client's earlier real data.
    std::optional<double> replay_fidelity_kl;

    /// Current training set: real data followed by the replay cache.
    [[nodiscard]] std::vector<data::Example> training_set() const;
};

/// Fresh client. DCFL clients get a denoiser drawn from `init_rng`.
ClientState make_client(int client_id, const ExperimentConfig& config, const models::MlpShape& target_shape,
                        const models::DenoiserShape& denoiser_shape, numkit::RngStream& init_rng);

/// Installs the data of `session`, moves seen labels into prior labels and
/// empties the replay cache.
void load_session(ClientState& client, int session, std::vector<data::Example> examples);

/// Session-boundary bookkeeping for the regularized baselines: the EWC
/// anchor and Fisher diagonal are taken at `global_params` on the finished
/// session's training set; the LwF teacher becomes `global_params`.
void end_session(ClientState& client, const models::MlpParams& global_params, const ExperimentConfig& config);

/// round(delta * |current_real|) synthetic examples spread evenly over the
/// prior (class, domain) pairs, remainder to the lowest pairs. Throws
/// PreconditionError in session 0, without prior labels, or before the
/// denoiser has been trained.
std::vector<data::Example> generate_replay(const ClientState& client, const diffusion::NoiseSchedule& schedule,
                                           double delta, numkit::RngStream& rng,
                                           const diffusion::SampleOptions& options = {});

/// Per-pair sample counts used by generate_replay.
std::vector<std::size_t> replay_allocation(std::size_t total, std::size_t pairs);

struct LocalResult {
    models::MlpParams params;
    std::size_t sample_count = 0;
    double train_loss = 0.0;
    bool replay_regenerated = false;
};

/// One round of local training starting from `global_params`.
///
/// The target model runs epochs_target epochs of mini-batch Adam on
/// current_real + replay_cache plus the method's penalty. For DCFL the
/// replay cache is regenerated and the denoiser retrained on the mixed set
/// at the first round of each session (every round with replay_every_round).
LocalResult local_update(ClientState& client, const models::MlpParams& global_params, const ExperimentConfig& config,
                         const diffusion::NoiseSchedule& schedule, int round, numkit::RngStream& rng);

} // namespace dcfl::flcore
