#include "dcfl/flcore/config.hpp"

#include "dcfl/errors.hpp"

#include <array>
#include <cstdio>
#include <utility>

namespace dcfl::flcore {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 5> kMethodNames{{
    {Method::DCFL, "dcfl"},
    {Method::FedAvg, "fedavg"},
    {Method::FedProx, "fedprox"},
    {Method::FedAvgEWC, "fedavg_ewc"},
    {Method::FedAvgLwF, "fedavg_lwf"},
}};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string_view to_string(Method method) {
    for (const auto& [m, name] : kMethodNames) {
        if (m == method) return name;
    }
    return "unknown";
}

std::optional<Method> method_from_string(std::string_view name) {
    for (const auto& [m, n] : kMethodNames) {
        if (n == name) return m;
    }
    return std::nullopt;
}

std::optional<data::Scenario> scenario_from_string(std::string_view name) {
    for (auto s : {data::Scenario::ClassIncIID, data::Scenario::ClassIncNonIID, data::Scenario::DomainInc}) {
        if (data::to_string(s) == name) return s;
    }
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    auto positive = [](const char* key, double v) {
        if (!(v > 0)) throw ConfigError(key, "must be > 0");
    };
    positive("clients", clients);
    positive("sessions", sessions);
    positive("rounds", rounds);
    positive("classes_per_session", classes_per_session);
    if (rounds % sessions != 0) throw ConfigError("rounds", "T not divisible by S");
    if (epochs_target < 0) throw ConfigError("epochs_target", "must be >= 0");
    if (epochs_diffusion < 0) throw ConfigError("epochs_diffusion", "must be >= 0");
    positive("batch_size", batch_size);
    positive("lr_target", lr_target);
    positive("lr_diffusion", lr_diffusion);
    if (!(delta >= 0.0)) throw ConfigError("delta", "must be >= 0");
    positive("diffusion_steps", diffusion_steps);
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw ConfigError("beta_start", "need 0 < beta_start <= beta_end < 1");
    }
    if (!(mu_prox >= 0.0)) throw ConfigError("mu_prox", "must be >= 0");
    if (!(lambda_ewc >= 0.0)) throw ConfigError("lambda_ewc", "must be >= 0");
    if (!(lambda_lwf >= 0.0)) throw ConfigError("lambda_lwf", "must be >= 0");
    positive("hidden_width", hidden_width);
    positive("denoiser_hidden", denoiser_hidden);
    if (time_embed < 2 || time_embed % 2 != 0) throw ConfigError("time_embed", "must be a positive even number");
    positive("cond_embed", cond_embed);
}

std::string to_config_text(const ExperimentConfig& c) {
    std::string out;
    auto put = [&](std::string_view key, const std::string& value) {
        out.append(key).append(" = ").append(value).push_back('\n');
    };
    put("scenario", std::string(data::to_string(c.scenario)));
    put("method", std::string(to_string(c.method)));
    put("clients", std::to_string(c.clients));
    put("sessions", std::to_string(c.sessions));
    put("rounds", std::to_string(c.rounds));
    put("classes_per_session", std::to_string(c.classes_per_session));
    put("epochs_target", std::to_string(c.epochs_target));
    put("epochs_diffusion", std::to_string(c.epochs_diffusion));
    put("batch_size", std::to_string(c.batch_size));
    put("lr_target", fmt_double(c.lr_target));
    put("lr_diffusion", fmt_double(c.lr_diffusion));
    put("delta", fmt_double(c.delta));
    put("diffusion_steps", std::to_string(c.diffusion_steps));
    put("beta_start", fmt_double(c.beta_start));
    put("beta_end", fmt_double(c.beta_end));
    put("mu_prox", fmt_double(c.mu_prox));
    put("lambda_ewc", fmt_double(c.lambda_ewc));
    put("lambda_lwf", fmt_double(c.lambda_lwf));
    put("seed", std::to_string(c.seed));
    put("hidden_width", std::to_string(c.hidden_width));
    put("denoiser_hidden", std::to_string(c.denoiser_hidden));
    put("time_embed", std::to_string(c.time_embed));
    put("cond_embed", std::to_string(c.cond_embed));
    put("replay_every_round", c.replay_every_round ? "true" : "false");
    put("clamp_replay", c.clamp_replay ? "true" : "false");
    return out;
}

std::uint64_t config_digest(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_config_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace dcfl::flcore
