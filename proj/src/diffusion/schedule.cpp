#include "dcfl/diffusion/schedule.hpp"

#include "dcfl/errors.hpp"

#include <string>

namespace dcfl::diffusion {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
    if (beta_.empty()) throw DomainError("NoiseSchedule: need at least one step");
    double running = 1.0;
    for (std::size_t i = 0; i < beta_.size(); ++i) {
        const double b = beta_[i];
        if (!(b > 0.0 && b < 1.0)) throw DomainError("NoiseSchedule: beta_" + std::to_string(i + 1) + " outside (0, 1)");
        alpha_.push_back(1.0 - b);
        running *= 1.0 - b;
        alpha_bar_.push_back(running);
    }
}

NoiseSchedule make_linear_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 1) throw DomainError("make_linear_schedule: N must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw DomainError("make_linear_schedule: need 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> betas(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
        betas[static_cast<std::size_t>(i)] = beta_start + frac * (beta_end - beta_start);
    }
    return NoiseSchedule(std::move(betas));
}

} // namespace dcfl::diffusion
