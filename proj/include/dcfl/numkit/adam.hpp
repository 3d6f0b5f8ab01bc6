#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dcfl::numkit {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::int64_t step_count = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    AdamState(std::size_t size, const AdamConfig& config = {});
};

/// One bias-corrected Adam update of `params` in place.
/// Throws DimensionError on length mismatch and NumericError on a non-finite gradient.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad);

} // namespace dcfl::numkit
