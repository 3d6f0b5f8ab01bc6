#include "dcfl/cli/csv.hpp"

#include "dcfl/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dcfl::cli {

std::string format_real(double value) {
    char buf[64];
    // snprintf honours LC_NUMERIC; the CLI never changes it from "C".
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

RunSummary summarize(const flcore::ExperimentConfig& config, std::span<const flcore::RoundRecord> records) {
    if (records.empty()) throw DomainError("summarize: no rounds");
    RunSummary s;
    s.method = config.method;
    s.scenario = config.scenario;
    s.clients = config.clients;
    s.delta = config.delta;
    s.seed = config.seed;
    s.rounds = static_cast<int>(records.size());
    s.final_accuracy = records.back().global_accuracy;
    s.final_encountered_accuracy = records.back().encountered_accuracy;
    double acc = 0.0;
    for (const auto& r : records) acc += r.global_accuracy;
    s.mean_accuracy = acc / static_cast<double>(records.size());
    for (const auto& r : records) s.total_wall_time_s += r.wall_time_s;
    return s;
}

std::string rounds_csv(std::span<const flcore::RoundRecord> records) {
    std::string out = kRoundsHeader;
    out.push_back('\n');
    for (const auto& r : records) {
        out += std::to_string(r.round) + ',' + std::to_string(r.session) + ',' + std::string(flcore::to_string(r.method)) +
               ',' + format_real(r.global_accuracy) + ',' + format_real(r.encountered_accuracy) + ',' +
               format_real(r.mean_train_loss) + ',' +
               (r.synthetic_fidelity_kl ? format_real(*r.synthetic_fidelity_kl) : std::string()) + ',' +
               format_real(r.wall_time_s) + '\n';
    }
    return out;
}

std::string summary_row(const RunSummary& s) {
    return std::string(flcore::to_string(s.method)) + ',' + std::string(data::to_string(s.scenario)) + ',' +
           std::to_string(s.clients) + ',' + format_real(s.delta) + ',' + std::to_string(s.seed) + ',' +
           std::to_string(s.rounds) + ',' + format_real(s.final_accuracy) + ',' +
           format_real(s.final_encountered_accuracy) + ',' + format_real(s.mean_accuracy) + ',' +
           format_real(s.total_wall_time_s);
}

std::string summary_csv(const RunSummary& summary) {
    return std::string(kSummaryHeader) + '\n' + summary_row(summary) + '\n';
}

std::string mask_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    bool header = true;
    while (std::getline(in, line)) {
        const auto comma = header ? std::string::npos : line.rfind(',');
        header = false;
        out += (comma == std::string::npos ? line : line.substr(0, comma + 1));
        out.push_back('\n');
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace dcfl::cli
