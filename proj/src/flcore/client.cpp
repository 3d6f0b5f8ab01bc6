#include "dcfl/flcore/client.hpp"

#include "dcfl/errors.hpp"
#include "dcfl/flcore/penalties.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace dcfl::flcore {

namespace {

// Child-stream keys of the per-(client, round) stream.
constexpr std::uint64_t kTargetStream = 0;
constexpr std::uint64_t kReplayStream = 1;
constexpr std::uint64_t kDiffusionStream = 2;

} // namespace

std::vector<data::Example> ClientState::training_set() const {
    std::vector<data::Example> out;
    out.reserve(current_real.size() + replay_cache.size());
    out.insert(out.end(), current_real.begin(), current_real.end());
    out.insert(out.end(), replay_cache.begin(), replay_cache.end());
    return out;
}

ClientState make_client(int client_id, const ExperimentConfig& config, const models::MlpShape& target_shape,
                        const models::DenoiserShape& denoiser_shape, numkit::RngStream& init_rng) {
    ClientState c;
    c.client_id = client_id;
    c.target_params = models::MlpParams(target_shape);
    if (config.method == Method::DCFL) {
        c.diffusion_params = models::init_denoiser(denoiser_shape, init_rng);
        c.diffusion_opt = numkit::AdamState(c.diffusion_params->values().size(), {.learning_rate = config.lr_diffusion});
    }
    return c;
}

void load_session(ClientState& client, int session, std::vector<data::Example> examples) {
    client.session = session;
    client.prior_labels = client.seen_labels;
    for (const auto& ex : examples) client.seen_labels.insert({ex.label, ex.domain});
    client.current_real = std::move(examples);
    client.replay_cache.clear();
    client.replay_fidelity_kl.reset();
}

void end_session(ClientState& client, const models::MlpParams& global_params, const ExperimentConfig& config) {
    if (config.method == Method::FedAvgEWC) {
        client.ewc_anchor = global_params;
        const auto data = client.training_set();
        if (!data.empty()) client.ewc_fisher = ewc_fisher_estimate(global_params, data);
        else client.ewc_fisher.assign(global_params.flat().size(), 0.0);
    }
    if (config.method == Method::FedAvgLwF) client.lwf_teacher = global_params;
}

std::vector<std::size_t> replay_allocation(std::size_t total, std::size_t pairs) {
    std::vector<std::size_t> counts(pairs, pairs == 0 ? 0 : total / pairs);
    for (std::size_t i = 0; pairs != 0 && i < total % pairs; ++i) ++counts[i];
    return counts;
}

std::vector<data::Example> generate_replay(const ClientState& client, const diffusion::NoiseSchedule& schedule,
                                           double delta, numkit::RngStream& rng,
                                           const diffusion::SampleOptions& options) {
    if (client.session < 1) throw PreconditionError("generate_replay: no replay in session 0");
    if (client.prior_labels.empty()) throw PreconditionError("generate_replay: no previously seen labels");
    if (!client.diffusion_params || !client.diffusion_trained) {
        throw PreconditionError("generate_replay: diffusion model has not been trained");
    }
    if (!(delta >= 0.0)) throw DomainError("generate_replay: delta must be >= 0");

    const auto total = static_cast<std::size_t>(std::llround(delta * static_cast<double>(client.current_real.size())));
    const auto counts = replay_allocation(total, client.prior_labels.size());

    std::vector<int> labels;
    std::vector<int> domains;
    labels.reserve(total);
    domains.reserve(total);
    std::size_t pair = 0;
    for (const auto& key : client.prior_labels) {
        for (std::size_t i = 0; i < counts[pair]; ++i) {
            labels.push_back(key.label);
            domains.push_back(key.domain);
        }
        ++pair;
    }
    if (labels.empty()) return {};

    const auto& params = *client.diffusion_params;
    const bool conditioned_on_domain = params.shape().domains > 0;
    const numkit::Matrix samples = diffusion::sample_reverse(
        params, labels, conditioned_on_domain ? std::span<const int>(domains) : std::span<const int>(), schedule, rng,
        options);

    std::vector<data::Example> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto row = samples.row(static_cast<Eigen::Index>(i));
        out[i].features.assign(row.data(), row.data() + row.size());
        out[i].label = labels[i];
        out[i].domain = domains[i];
    }
    return out;
}

LocalResult local_update(ClientState& client, const models::MlpParams& global_params, const ExperimentConfig& config,
                         const diffusion::NoiseSchedule& schedule, int round, numkit::RngStream& rng) {
    if (client.current_real.empty()) throw PreconditionError("local_update: client has no data for this session");
    if (global_params.shape().d_feat != static_cast<int>(client.current_real.front().features.size())) {
        throw DimensionError("local_update: model input width does not match client data");
    }

    const int rps = config.rounds_per_session();
    const int session = round / rps;
    const bool first_round = round % rps == 0;
    const bool refresh_replay = config.method == Method::DCFL && (first_round || config.replay_every_round);

    LocalResult result;
    if (refresh_replay && session >= 1) {
        auto replay_rng = rng.split(kReplayStream);
        client.replay_cache = generate_replay(client, schedule, config.delta, replay_rng, {.clamp_unit = config.clamp_replay});
        result.replay_regenerated = true;
    }

    const auto train = client.training_set();
    models::MlpParams theta = global_params;
    numkit::AdamState opt(theta.flat().size(), {.learning_rate = config.lr_target});
    auto target_rng = rng.split(kTargetStream);

    const bool use_ewc = config.method == Method::FedAvgEWC && client.ewc_anchor.has_value();
    const bool use_lwf = config.method == Method::FedAvgLwF && client.lwf_teacher.has_value();
    const bool use_prox = config.method == Method::FedProx;

    std::vector<std::size_t> order(train.size());
    const auto bs = static_cast<std::size_t>(config.batch_size);
    for (int e = 0; e < config.epochs_target; ++e) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        target_rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const auto count = std::min(bs, order.size() - start);
            const auto batch = models::make_batch(train, std::span<const std::size_t>(order).subspan(start, count));
            auto lg = use_lwf ? lwf_loss_grad(theta, *client.lwf_teacher, batch, config.lambda_lwf)
                              : models::mlp_loss_grad(theta, batch);
            if (use_prox) add_prox_penalty(theta.flat(), global_params.flat(), config.mu_prox, lg.grad);
            if (use_ewc) add_ewc_penalty(theta.flat(), client.ewc_anchor->flat(), client.ewc_fisher, config.lambda_ewc, lg.grad);
            numkit::adam_step(opt, theta.flat(), lg.grad);
        }
    }

    const auto full = models::make_batch(train);
    result.train_loss = models::cross_entropy(models::mlp_forward_batch(theta, full.features), full.labels);

    if (config.method == Method::DCFL && (first_round || config.replay_every_round)) {
        auto diffusion_rng = rng.split(kDiffusionStream);
        diffusion::train_diffusion(*client.diffusion_params, train, schedule, config.epochs_diffusion, config.batch_size,
                                   client.diffusion_opt, diffusion_rng);
        client.diffusion_trained = true;
    }

    client.target_params = theta;
    result.params = std::move(theta);
    result.sample_count = train.size();
    return result;
}

} // namespace dcfl::flcore
