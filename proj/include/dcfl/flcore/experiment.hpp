#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/data/partition.hpp"
#include "dcfl/flcore/client.hpp"
#include "dcfl/flcore/config.hpp"
#include "dcfl/models/mlp.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dcfl::flcore {

struct RoundRecord {
    int round = 0;   // 1-based
    int session = 0; // 1-based
    Method method = Method::FedAvg;
    double global_accuracy = 0.0;
    double encountered_accuracy = 0.0;
    double mean_train_loss = 0.0;
    std::optional<double> synthetic_fidelity_kl;
    double wall_time_s = 0.0;
};

struct GlobalState {
    models::MlpParams global_params;
    int round = 0;
    int session = 0;
};

struct RunOptions {
    /// Order in which clients execute their local updates; identity when
    /// empty. Results do not depend on it.
    std::vector<int> client_order;
    /// Worker threads for the per-round local updates.
    int threads = 1;
    /// Called after each round is evaluated.
    std::function<void(const RoundRecord&)> on_round;
};

struct ExperimentResult {
    std::vector<RoundRecord> records;
    GlobalState final_state;
    std::vector<ClientState> clients;
};

/// Raised when a round fails; the message carries round and client context.
struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

models::MlpShape target_shape(const ExperimentConfig& config, const data::Dataset& dataset);
models::DenoiserShape denoiser_shape(const ExperimentConfig& config, const data::Dataset& dataset);

/// Full-participation federated loop over all rounds of `schedule`.
///
/// Each round loads session data at session boundaries, runs every client's
/// local update, aggregates with weights |X_k| (replay included), then
/// evaluates the global model on `test_set`. Per-(client, round) random
/// streams are keyed by client id and round, so execution order and thread
/// count do not change the results.
ExperimentResult run_experiment(const ExperimentConfig& config, const data::ClientSchedule& schedule,
                                const data::Dataset& dataset, const data::Dataset& test_set,
                                const RunOptions& options = {});

} // namespace dcfl::flcore
