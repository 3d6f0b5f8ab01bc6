#include "dcfl/flcore/aggregate.hpp"

#include "dcfl/errors.hpp"

namespace dcfl::flcore {

std::vector<double> aggregate(std::span<const std::vector<double>> client_params,
                              std::span<const std::size_t> sample_counts) {
    if (client_params.empty()) throw DomainError("aggregate: no client parameters");
    if (client_params.size() != sample_counts.size()) throw DomainError("aggregate: one count per client required");
    const std::size_t len = client_params.front().size();
    std::size_t total = 0;
    for (std::size_t k = 0; k < client_params.size(); ++k) {
        if (client_params[k].size() != len) throw DomainError("aggregate: parameter length mismatch");
        total += sample_counts[k];
    }
    if (total == 0) throw DomainError("aggregate: zero total sample count");

    std::vector<double> out(len, 0.0);
    for (std::size_t k = 0; k < client_params.size(); ++k) {
        const double weight = static_cast<double>(sample_counts[k]) / static_cast<double>(total);
        const auto& p = client_params[k];
        for (std::size_t i = 0; i < len; ++i) out[i] += weight * p[i];
    }
    return out;
}

} // namespace dcfl::flcore
