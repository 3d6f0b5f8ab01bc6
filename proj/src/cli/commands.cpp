#include "dcfl/cli/commands.hpp"

#include "dcfl/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <set>

namespace dcfl::cli {

namespace {

std::string value_label(SweepAxis axis, double v) {
    if (axis == SweepAxis::Clients) return std::to_string(static_cast<int>(v));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Maps exceptions onto the exit-code contract.
template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

} // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config) {
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return config.output_dir;
}

RunOutputs execute_run(const RunConfig& config, const flcore::RunOptions& options) {
    const auto prepared = prepare_run(config);
    auto opts = options;
    if (opts.threads == 1) opts.threads = config.threads;
    auto result = flcore::run_experiment(config.experiment, prepared.schedule, prepared.train, prepared.test, opts);
    RunOutputs out;
    out.summary = summarize(config.experiment, result.records);
    out.records = std::move(result.records);
    return out;
}

SweepAxis parse_sweep_axis(std::string_view axis) {
    if (axis == "clients") return SweepAxis::Clients;
    if (axis == "delta") return SweepAxis::Delta;
    throw ConfigError("axis", "expected clients or delta, got '" + std::string(axis) + "'");
}

std::vector<double> parse_sweep_values(SweepAxis axis, std::string_view text) {
    std::vector<double> out;
    std::set<double> seen;
    while (true) {
        const auto comma = text.find(',');
        std::string item(text.substr(0, comma));
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
            throw ConfigError("values", "malformed value '" + item + "'");
        }
        if (axis == SweepAxis::Clients && (v < 1 || v != std::floor(v) || v > 1e6)) {
            throw ConfigError("values", "client counts must be positive integers, got '" + item + "'");
        }
        if (axis == SweepAxis::Delta && v < 0) throw ConfigError("values", "delta must be >= 0, got '" + item + "'");
        if (!seen.insert(v).second) throw ConfigError("values", "duplicate value '" + item + "'");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto config = parse_config(config_path);
        const auto dir = resolve_output_dir(config);
        flcore::RunOptions options;
        options.on_round = [&](const flcore::RoundRecord& r) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "round %d session %d acc %.4f enc %.4f loss %.4f\n", r.round, r.session,
                          r.global_accuracy, r.encountered_accuracy, r.mean_train_loss);
            out << buf << std::flush;
        };
        const auto result = execute_run(config, options);
        write_text_file(dir / "rounds.csv", rounds_csv(result.records));
        write_text_file(dir / "summary.csv", summary_csv(result.summary));
        out << "wrote " << (dir / "rounds.csv").string() << " and summary.csv\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_sweep(const std::filesystem::path& config_path, std::string_view axis_name, std::string_view values,
              std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto base = parse_config(config_path);
        const auto axis = parse_sweep_axis(axis_name);
        const auto points = parse_sweep_values(axis, values);
        const auto dir = resolve_output_dir(base);

        std::string table = "axis,value," + std::string(kSummaryHeader) + '\n';
        for (double v : points) {
            auto config = base;
            if (axis == SweepAxis::Clients) config.experiment.clients = static_cast<int>(v);
            else config.experiment.delta = v;
            config.experiment.validate();

            const auto label = value_label(axis, v);
            out << "sweep " << axis_name << " = " << label << '\n' << std::flush;
            const auto result = execute_run(config);
            write_text_file(dir / (std::string(axis_name) + "_" + label) / "rounds.csv", rounds_csv(result.records));
            table += std::string(axis_name) + ',' + label + ',' + summary_row(result.summary) + '\n';
        }
        write_text_file(dir / ("sweep_" + std::string(axis_name) + ".csv"), table);
        out << "wrote " << (dir / ("sweep_" + std::string(axis_name) + ".csv")).string() << '\n';
        return static_cast<int>(kExitOk);
    });
}

int cmd_selftest(const SelftestOptions& options, std::ostream& out) {
    const auto results = run_selftest_suites(options);
    return print_selftest_table(results, out) ? kExitOk : kExitSelftestFailure;
}

} // namespace dcfl::cli
