#include "dcfl/numkit/adam.hpp"

#include "dcfl/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace dcfl::numkit {

AdamState::AdamState(std::size_t size, const AdamConfig& config)
    : first_moment(size, 0.0),
      second_moment(size, 0.0),
      learning_rate(config.learning_rate),
      beta1(config.beta1),
      beta2(config.beta2),
      epsilon(config.epsilon) {}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad) {
    if (grad.size() != params.size()) {
        throw DimensionError("adam_step: gradient length " + std::to_string(grad.size()) +
                             " != parameter length " + std::to_string(params.size()));
    }
    if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
        throw DimensionError("adam_step: moment vectors do not match parameter length");
    }
    const Eigen::Map<const Eigen::ArrayXd> g(grad.data(), static_cast<Eigen::Index>(grad.size()));
    if (!g.allFinite()) throw NumericError("adam_step: non-finite gradient entry");

    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double bias1 = 1.0 - std::pow(state.beta1, t);
    const double bias2 = 1.0 - std::pow(state.beta2, t);

    const auto n = static_cast<Eigen::Index>(params.size());
    Eigen::Map<Eigen::ArrayXd> m(state.first_moment.data(), n);
    Eigen::Map<Eigen::ArrayXd> v(state.second_moment.data(), n);
    Eigen::Map<Eigen::ArrayXd> w(params.data(), n);
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    w -= state.learning_rate * (m / bias1) / ((v / bias2).sqrt() + state.epsilon);
}

} // namespace dcfl::numkit
