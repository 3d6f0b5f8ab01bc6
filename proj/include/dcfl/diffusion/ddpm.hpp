#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/diffusion/schedule.hpp"
#include "dcfl/models/batch.hpp"
#include "dcfl/models/denoiser.hpp"
#include "dcfl/models/mlp.hpp"
#include "dcfl/numkit/adam.hpp"
#include "dcfl/numkit/matrix.hpp"
#include "dcfl/numkit/rng.hpp"

#include <span>
#include <vector>

namespace dcfl::diffusion {

/// Closed-form forward marginal x_n = sqrt(alpha_bar_n) x0 + sqrt(1 - alpha_bar_n) eps.
std::vector<double> forward_sample(std::span<const double> x0, int step, std::span<const double> eps,
                                   const NoiseSchedule& schedule);

/// Epsilon-prediction loss with the per-example steps and noise fixed by the
/// caller: mean over rows of ||eps - eps_hat(x_n, n, y)||^2.
models::LossGrad diffusion_loss_grad_fixed(const models::DenoiserParams& params, const models::Batch& batch,
                                           std::span<const int> steps, const numkit::Matrix& noise,
                                           const NoiseSchedule& schedule);

/// Same loss with n ~ U{1..N} and eps ~ N(0, I) drawn per example from `rng`.
models::LossGrad diffusion_loss_grad(const models::DenoiserParams& params, const models::Batch& batch,
                                     const NoiseSchedule& schedule, numkit::RngStream& rng);

struct SampleOptions {
    /// Clamp the final samples to [0, 1] (image-derived data only).
    bool clamp_unit = false;
};

/// Ancestral sampling from x_N ~ N(0, I) down to x_0, one output row per
/// requested label. `domains` is empty unless the denoiser conditions on
/// domains. No noise is added on the final (n = 1) transition.
numkit::Matrix sample_reverse(const models::DenoiserParams& params, std::span<const int> labels,
                              std::span<const int> domains, const NoiseSchedule& schedule, numkit::RngStream& rng,
                              const SampleOptions& options = {});

struct DiffusionTrainReport {
    /// Mean mini-batch loss of each epoch.
    std::vector<double> epoch_losses;
};

/// Shuffled mini-batch Adam on diffusion_loss_grad for `epochs` epochs.
DiffusionTrainReport train_diffusion(models::DenoiserParams& params, std::span<const data::Example> data,
                                     const NoiseSchedule& schedule, int epochs, int batch_size,
                                     numkit::AdamState& opt, numkit::RngStream& rng);

} // namespace dcfl::diffusion
