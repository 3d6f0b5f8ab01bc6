#include "dcfl/flcore/experiment.hpp"

#include "dcfl/errors.hpp"
#include "dcfl/flcore/aggregate.hpp"
#include "dcfl/flcore/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>
#include <string>

namespace dcfl::flcore {

namespace {

constexpr std::uint64_t kGlobalInitStream = 1;
constexpr std::uint64_t kClientInitStream = 2;
constexpr std::uint64_t kRoundStream = 3;

std::vector<data::Example> gather(const data::Dataset& dataset, const std::vector<std::size_t>& indices) {
    std::vector<data::Example> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(dataset[i]);
    return out;
}

void check_consistency(const ExperimentConfig& config, const data::ClientSchedule& schedule,
                       const data::Dataset& dataset, const data::Dataset& test_set) {
    config.validate();
    if (schedule.num_clients != config.clients) throw DomainError("run_experiment: schedule client count != config.clients");
    if (schedule.num_sessions != config.sessions) throw DomainError("run_experiment: schedule session count != config.sessions");
    if (schedule.rounds_per_session != config.rounds_per_session()) {
        throw DomainError("run_experiment: schedule rounds_per_session != rounds / sessions");
    }
    if (schedule.scenario != config.scenario) throw DomainError("run_experiment: schedule scenario != config.scenario");
    if (test_set.empty()) throw DomainError("run_experiment: empty test set");
    if (test_set.d_feat() != dataset.d_feat()) throw DimensionError("run_experiment: test set feature width differs");
}

} // namespace

models::MlpShape target_shape(const ExperimentConfig& config, const data::Dataset& dataset) {
    return {.d_feat = dataset.d_feat(), .hidden = config.hidden_width, .classes = dataset.num_classes()};
}

models::DenoiserShape denoiser_shape(const ExperimentConfig& config, const data::Dataset& dataset) {
    return {.d_feat = dataset.d_feat(),
            .hidden = config.denoiser_hidden,
            .time_embed = config.time_embed,
            .cond_embed = config.cond_embed,
            .classes = dataset.num_classes(),
            .domains = dataset.num_domains() >= 2 ? dataset.num_domains() : 0,
            .max_step = config.diffusion_steps};
}

ExperimentResult run_experiment(const ExperimentConfig& config, const data::ClientSchedule& schedule,
                                const data::Dataset& dataset, const data::Dataset& test_set,
                                const RunOptions& options) {
    check_consistency(config, schedule, dataset, test_set);

    const int num_clients = config.clients;
    std::vector<int> order = options.client_order;
    if (order.empty()) {
        order.resize(static_cast<std::size_t>(num_clients));
        std::iota(order.begin(), order.end(), 0);
    } else {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k < num_clients; ++k) {
            if (sorted.size() != static_cast<std::size_t>(num_clients) || sorted[static_cast<std::size_t>(k)] != k) {
                throw DomainError("run_experiment: client_order must permute 0..K-1");
            }
        }
    }

    const numkit::RngStream root(config.seed);
    const auto noise = diffusion::make_linear_schedule(config.diffusion_steps, config.beta_start, config.beta_end);
    const auto mlp_shape = target_shape(config, dataset);
    const auto den_shape = denoiser_shape(config, dataset);
    const auto axis = config.scenario == data::Scenario::DomainInc ? EncounterAxis::Domain : EncounterAxis::Class;

    ExperimentResult result;
    auto& global = result.final_state;
    {
        auto init_rng = root.split(kGlobalInitStream);
        global.global_params = models::init_mlp(mlp_shape, init_rng);
    }
    auto& clients = result.clients;
    const auto client_init_root = root.split(kClientInitStream);
    for (int k = 0; k < num_clients; ++k) {
        auto init_rng = client_init_root.split(static_cast<std::uint64_t>(k));
        clients.push_back(make_client(k, config, mlp_shape, den_shape, init_rng));
    }
    const auto round_root = root.split(kRoundStream);

    std::set<int> encountered;
    const int rps = config.rounds_per_session();
    for (int t = 0; t < config.rounds; ++t) {
        const auto started = std::chrono::steady_clock::now();
        const int session = t / rps;

        if (t % rps == 0) {
            for (auto& client : clients) {
                if (session > 0) end_session(client, global.global_params, config);
                load_session(client, session, gather(dataset, schedule.indices(client.client_id, session)));
                for (const auto& key : client.seen_labels) encountered.insert(axis == EncounterAxis::Class ? key.label : key.domain);
            }
        }

        std::vector<LocalResult> locals(static_cast<std::size_t>(num_clients));
        auto run_client = [&](int k) {
            auto& client = clients[static_cast<std::size_t>(k)];
            try {
                auto rng = round_root.split(static_cast<std::uint64_t>(k)).split(static_cast<std::uint64_t>(t));
                locals[static_cast<std::size_t>(k)] = local_update(client, global.global_params, config, noise, t, rng);
                if (locals[static_cast<std::size_t>(k)].replay_regenerated && !client.replay_cache.empty()) {
                    std::vector<data::Example> real_prev;
                    for (int s = 0; s < session; ++s) {
                        auto part = gather(dataset, schedule.indices(k, s));
                        real_prev.insert(real_prev.end(), part.begin(), part.end());
                    }
                    try {
                        client.replay_fidelity_kl = synthetic_fidelity_kl(real_prev, client.replay_cache);
                    } catch (const DomainError&) {
                        client.replay_fidelity_kl.reset();
                    }
                }
            } catch (const std::exception& e) {
                throw ExperimentError("round " + std::to_string(t + 1) + ", client " + std::to_string(k) + ": " + e.what());
            }
        };

        if (options.threads <= 1) {
            for (int k : order) run_client(k);
        } else {
            for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.threads)) {
                std::vector<std::future<void>> pending;
                const auto stop = std::min(order.size(), start + static_cast<std::size_t>(options.threads));
                for (std::size_t i = start; i < stop; ++i) pending.push_back(std::async(std::launch::async, run_client, order[i]));
                for (auto& f : pending) f.get();
            }
        }

        std::vector<std::vector<double>> params;
        std::vector<std::size_t> counts;
        double loss_sum = 0.0;
        double kl_sum = 0.0;
        int kl_count = 0;
        for (int k = 0; k < num_clients; ++k) {
            const auto& local = locals[static_cast<std::size_t>(k)];
            params.push_back(local.params.values());
            counts.push_back(local.sample_count);
            loss_sum += local.train_loss;
            if (const auto& kl = clients[static_cast<std::size_t>(k)].replay_fidelity_kl) {
                kl_sum += *kl;
                ++kl_count;
            }
        }
        global.global_params = models::MlpParams(mlp_shape, aggregate(params, counts));
        global.round = t + 1;
        global.session = session;

        RoundRecord rec;
        rec.round = t + 1;
        rec.session = session + 1;
        rec.method = config.method;
        rec.global_accuracy = eval_global_accuracy(global.global_params, test_set);
        rec.encountered_accuracy = eval_encountered_accuracy(global.global_params, test_set, encountered, axis);
        rec.mean_train_loss = loss_sum / num_clients;
        if (kl_count > 0) rec.synthetic_fidelity_kl = kl_sum / kl_count;
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.records.push_back(rec);
        if (options.on_round) options.on_round(rec);
    }
    return result;
}

} // namespace dcfl::flcore
