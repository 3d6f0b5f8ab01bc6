#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcfl::flcore {

/// Sample-count weighted average sum_k p_k theta_k with p_k = n_k / sum n.
/// Throws DomainError on empty input, unequal lengths or a zero total count.
std::vector<double> aggregate(std::span<const std::vector<double>> client_params,
                              std::span<const std::size_t> sample_counts);

} // namespace dcfl::flcore
