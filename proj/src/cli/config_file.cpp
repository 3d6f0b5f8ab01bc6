#include "dcfl/cli/config_file.hpp"

#include "dcfl/data/idx.hpp"
#include "dcfl/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dcfl::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, std::string_view v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

int parse_int32(const std::string& key, std::string_view v) {
    const long long x = parse_int(key, v);
    if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(key, "integer out of range");
    return static_cast<int>(x);
}

double parse_real(const std::string& key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(x)) {
        throw ConfigError(key, "expected a finite number, got '" + s + "'");
    }
    return x;
}

bool parse_bool(const std::string& key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
}

std::vector<int> parse_int_list(const std::string& key, std::string_view v) {
    std::vector<int> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(parse_int32(key, trim(v.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> m;
        auto int_field = [&](const char* key, auto member) {
            m[key] = [member](RunConfig& c, const std::string& k, std::string_view v) { c.experiment.*member = parse_int32(k, v); };
        };
        auto real_field = [&](const char* key, auto member) {
            m[key] = [member](RunConfig& c, const std::string& k, std::string_view v) { c.experiment.*member = parse_real(k, v); };
        };
        using E = flcore::ExperimentConfig;
        m["scenario"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            const auto s = flcore::scenario_from_string(v);
            if (!s) throw ConfigError(k, "unknown scenario '" + std::string(v) + "'");
            c.experiment.scenario = *s;
        };
        m["method"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            const auto s = flcore::method_from_string(v);
            if (!s) throw ConfigError(k, "unknown method '" + std::string(v) + "'");
            c.experiment.method = *s;
        };
        int_field("clients", &E::clients);
        int_field("sessions", &E::sessions);
        int_field("rounds", &E::rounds);
        int_field("classes_per_session", &E::classes_per_session);
        int_field("epochs_target", &E::epochs_target);
        int_field("epochs_diffusion", &E::epochs_diffusion);
        int_field("batch_size", &E::batch_size);
        real_field("lr_target", &E::lr_target);
        real_field("lr_diffusion", &E::lr_diffusion);
        real_field("delta", &E::delta);
        int_field("diffusion_steps", &E::diffusion_steps);
        real_field("beta_start", &E::beta_start);
        real_field("beta_end", &E::beta_end);
        real_field("mu_prox", &E::mu_prox);
        real_field("lambda_ewc", &E::lambda_ewc);
        real_field("lambda_lwf", &E::lambda_lwf);
        m["seed"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            const long long x = parse_int(k, v);
            if (x < 0) throw ConfigError(k, "must be >= 0");
            c.experiment.seed = static_cast<std::uint64_t>(x);
        };
        int_field("hidden_width", &E::hidden_width);
        int_field("denoiser_hidden", &E::denoiser_hidden);
        int_field("time_embed", &E::time_embed);
        int_field("cond_embed", &E::cond_embed);
        m["replay_every_round"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            c.experiment.replay_every_round = parse_bool(k, v);
        };
        m["clamp_replay"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            c.experiment.clamp_replay = parse_bool(k, v);
        };

        m["dataset"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            if (v == "blobs") c.dataset.kind = DatasetKind::Blobs;
            else if (v == "idx") c.dataset.kind = DatasetKind::Idx;
            else throw ConfigError(k, "expected blobs or idx, got '" + std::string(v) + "'");
        };
        m["blob_classes"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.dataset.blobs.num_classes = parse_int32(k, v); };
        m["blob_domains"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.dataset.blobs.num_domains = parse_int32(k, v); };
        m["blob_samples"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            c.dataset.blobs.samples_per_class_per_domain = parse_int32(k, v);
        };
        m["blob_d_feat"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.dataset.blobs.d_feat = parse_int32(k, v); };
        m["blob_separation"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            c.dataset.blobs.class_separation = parse_real(k, v);
        };
        m["blob_strength"] = [](RunConfig& c, const std::string& k, std::string_view v) {
            c.dataset.blobs.domain_transform_strength = parse_real(k, v);
        };
        m["idx_images"] = [](RunConfig& c, const std::string&, std::string_view v) { c.dataset.idx_images = std::string(v); };
        m["idx_labels"] = [](RunConfig& c, const std::string&, std::string_view v) { c.dataset.idx_labels = std::string(v); };
        m["idx_side"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.dataset.idx_side = parse_int32(k, v); };
        m["test_fraction"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.dataset.test_fraction = parse_real(k, v); };
        m["domain_order"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.dataset.domain_order = parse_int_list(k, v); };
        m["output_dir"] = [](RunConfig& c, const std::string&, std::string_view v) { c.output_dir = std::string(v); };
        m["threads"] = [](RunConfig& c, const std::string& k, std::string_view v) { c.threads = parse_int32(k, v); };
        return m;
    }();
    return table;
}

void validate(const RunConfig& c) {
    c.experiment.validate();
    const auto& d = c.dataset;
    if (d.kind == DatasetKind::Blobs) {
        if (d.blobs.num_classes < 2) throw ConfigError("blob_classes", "must be >= 2");
        if (d.blobs.num_domains < 1) throw ConfigError("blob_domains", "must be >= 1");
        if (d.blobs.samples_per_class_per_domain < 2) throw ConfigError("blob_samples", "must be >= 2");
        if (d.blobs.d_feat < 2) throw ConfigError("blob_d_feat", "must be >= 2");
        if (!(d.blobs.class_separation > 0)) throw ConfigError("blob_separation", "must be > 0");
        if (!(d.blobs.domain_transform_strength >= 0)) throw ConfigError("blob_strength", "must be >= 0");
    } else {
        if (d.idx_images.empty()) throw ConfigError("idx_images", "required when dataset = idx");
        if (d.idx_labels.empty()) throw ConfigError("idx_labels", "required when dataset = idx");
        if (d.idx_side < 0 || d.idx_side > 28 || (d.idx_side > 0 && 28 % d.idx_side != 0)) {
            throw ConfigError("idx_side", "must be 0 or a divisor of 28");
        }
        if (c.experiment.scenario == data::Scenario::DomainInc) {
            throw ConfigError("scenario", "domain_inc needs a multi-domain dataset; idx data has one domain");
        }
    }
    if (!(d.test_fraction > 0.0 && d.test_fraction < 1.0)) throw ConfigError("test_fraction", "must lie in (0, 1)");
    if (c.threads < 1) throw ConfigError("threads", "must be >= 1");

    const int classes = d.kind == DatasetKind::Blobs ? d.blobs.num_classes : 10;
    const auto& e = c.experiment;
    if (e.scenario == data::Scenario::DomainInc) {
        if (e.sessions != d.blobs.num_domains) throw ConfigError("sessions", "domain_inc needs one session per domain");
        if (!d.domain_order.empty()) {
            std::set<int> seen(d.domain_order.begin(), d.domain_order.end());
            if (static_cast<int>(d.domain_order.size()) != d.blobs.num_domains || seen.size() != d.domain_order.size() ||
                *seen.begin() != 0 || *seen.rbegin() != d.blobs.num_domains - 1) {
                throw ConfigError("domain_order", "must be a permutation of 0..blob_domains-1");
            }
        }
    } else if (e.sessions * e.classes_per_session > classes) {
        throw ConfigError("classes_per_session", "sessions * classes_per_session exceeds the class count");
    }
}

} // namespace

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> assigned;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(key, "unknown key");
        if (!assigned.insert(key).second) throw ConfigError(key, "set more than once");
        it->second(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string default_config_text() {
    const RunConfig c;
    std::string out = flcore::to_config_text(c.experiment);
    char buf[64];
    auto put = [&](const char* key, const std::string& v) { out.append(key).append(" = ").append(v).push_back('\n'); };
    put("dataset", "blobs");
    put("blob_classes", std::to_string(c.dataset.blobs.num_classes));
    put("blob_domains", std::to_string(c.dataset.blobs.num_domains));
    put("blob_samples", std::to_string(c.dataset.blobs.samples_per_class_per_domain));
    put("blob_d_feat", std::to_string(c.dataset.blobs.d_feat));
    std::snprintf(buf, sizeof buf, "%g", c.dataset.blobs.class_separation);
    put("blob_separation", buf);
    std::snprintf(buf, sizeof buf, "%g", c.dataset.blobs.domain_transform_strength);
    put("blob_strength", buf);
    put("idx_side", std::to_string(c.dataset.idx_side));
    std::snprintf(buf, sizeof buf, "%g", c.dataset.test_fraction);
    put("test_fraction", buf);
    put("output_dir", c.output_dir.string());
    put("threads", std::to_string(c.threads));
    return out;
}

PreparedRun prepare_run(const RunConfig& config) {
    const numkit::RngStream root(config.experiment.seed);
    data::Dataset full;
    if (config.dataset.kind == DatasetKind::Blobs) {
        auto rng = root.split(100);
        full = data::make_blobs(config.dataset.blobs, rng);
    } else {
        full = data::load_idx(config.dataset.idx_images, config.dataset.idx_labels);
        if (config.dataset.idx_side > 0 && config.dataset.idx_side != 28) {
            full = data::downsample_avgpool(full, 28, config.dataset.idx_side);
        }
    }

    auto split_rng = root.split(101);
    auto split = data::train_test_split(full, config.dataset.test_fraction, split_rng);

    auto part_rng = root.split(102);
    const auto& e = config.experiment;
    data::ClientSchedule schedule;
    switch (e.scenario) {
    case data::Scenario::ClassIncIID:
        schedule = data::partition_class_inc_iid(split.train, e.clients, e.sessions, e.classes_per_session, part_rng,
                                                 e.rounds_per_session());
        break;
    case data::Scenario::ClassIncNonIID:
        schedule = data::partition_class_inc_noniid(split.train, e.clients, e.sessions, e.classes_per_session, part_rng,
                                                    e.rounds_per_session());
        break;
    case data::Scenario::DomainInc:
        schedule = data::partition_domain_inc(split.train, e.clients, part_rng, config.dataset.domain_order,
                                              e.rounds_per_session());
        break;
    }
    return {std::move(split.train), std::move(split.test), std::move(schedule)};
}

} // namespace dcfl::cli
