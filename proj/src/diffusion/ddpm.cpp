#include "dcfl/diffusion/ddpm.hpp"

#include "dcfl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dcfl::diffusion {

using numkit::Matrix;

namespace {

std::span<const int> domain_condition(const models::DenoiserParams& params, const models::Batch& batch) {
    return params.shape().domains > 0 ? std::span<const int>(batch.domains) : std::span<const int>();
}

void check_step(int step, const NoiseSchedule& schedule) {
    if (step < 1 || step > schedule.steps()) {
        throw DomainError("diffusion: step " + std::to_string(step) + " outside [1, " +
                          std::to_string(schedule.steps()) + "]");
    }
}

} // namespace

std::vector<double> forward_sample(std::span<const double> x0, int step, std::span<const double> eps,
                                   const NoiseSchedule& schedule) {
    check_step(step, schedule);
    if (x0.size() != eps.size()) throw DimensionError("forward_sample: eps length != x0 length");
    const double a = std::sqrt(schedule.alpha_bar(step));
    const double b = std::sqrt(1.0 - schedule.alpha_bar(step));
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + b * eps[i];
    return out;
}

models::LossGrad diffusion_loss_grad_fixed(const models::DenoiserParams& params, const models::Batch& batch,
                                           std::span<const int> steps, const Matrix& noise,
                                           const NoiseSchedule& schedule) {
    const auto rows = static_cast<Eigen::Index>(batch.size());
    if (rows == 0) throw DomainError("diffusion_loss_grad: empty batch");
    if (steps.size() != batch.size() || noise.rows() != rows || noise.cols() != batch.features.cols()) {
        throw DimensionError("diffusion_loss_grad: steps/noise do not match the batch");
    }

    Matrix x_noisy(rows, batch.features.cols());
    for (Eigen::Index i = 0; i < rows; ++i) {
        const int n = steps[static_cast<std::size_t>(i)];
        check_step(n, schedule);
        const double ab = schedule.alpha_bar(n);
        x_noisy.row(i) = std::sqrt(ab) * batch.features.row(i) + std::sqrt(1.0 - ab) * noise.row(i);
    }

    const auto domains = domain_condition(params, batch);
    const auto acts = models::denoiser_forward_cached(params, x_noisy, steps, batch.labels, domains);
    const Matrix diff = acts.output - noise;

    models::LossGrad out;
    out.loss = diff.squaredNorm() / static_cast<double>(rows);
    out.grad = models::denoiser_backward(params, acts, (2.0 / static_cast<double>(rows)) * diff, batch.labels, domains);
    return out;
}

models::LossGrad diffusion_loss_grad(const models::DenoiserParams& params, const models::Batch& batch,
                                     const NoiseSchedule& schedule, numkit::RngStream& rng) {
    if (batch.size() == 0) throw DomainError("diffusion_loss_grad: empty batch");
    const auto rows = static_cast<Eigen::Index>(batch.size());
    std::vector<int> steps(batch.size());
    Matrix noise(rows, batch.features.cols());
    for (Eigen::Index i = 0; i < rows; ++i) {
        steps[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(schedule.steps())));
        for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.normal();
    }
    return diffusion_loss_grad_fixed(params, batch, steps, noise, schedule);
}

Matrix sample_reverse(const models::DenoiserParams& params, std::span<const int> labels,
                      std::span<const int> domains, const NoiseSchedule& schedule, numkit::RngStream& rng,
                      const SampleOptions& options) {
    const auto rows = static_cast<Eigen::Index>(labels.size());
    const int d = params.shape().d_feat;
    if (schedule.steps() > params.shape().max_step) {
        throw DomainError("sample_reverse: schedule longer than the denoiser's step range");
    }
    Matrix x(rows, d);
    if (rows == 0) return x;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
    }

    std::vector<int> steps(labels.size());
    for (int n = schedule.steps(); n >= 1; --n) {
        std::fill(steps.begin(), steps.end(), n);
        const auto acts = models::denoiser_forward_cached(params, x, steps, labels, domains);
        const double alpha = schedule.alpha(n);
        const double coef = (1.0 - alpha) / std::sqrt(1.0 - schedule.alpha_bar(n));
        x = (x - coef * acts.output) / std::sqrt(alpha);
        if (n > 1) {
            const double sigma = std::sqrt(schedule.beta(n));
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (int j = 0; j < d; ++j) x(i, j) += sigma * rng.normal();
            }
        }
        if (!x.allFinite()) throw NumericError("sample_reverse: non-finite sample at step " + std::to_string(n));
    }
    if (options.clamp_unit) x = x.cwiseMax(0.0).cwiseMin(1.0);
    return x;
}

DiffusionTrainReport train_diffusion(models::DenoiserParams& params, std::span<const data::Example> data,
                                     const NoiseSchedule& schedule, int epochs, int batch_size,
                                     numkit::AdamState& opt, numkit::RngStream& rng) {
    if (data.empty()) throw DomainError("train_diffusion: empty training data");
    if (batch_size < 1) throw DomainError("train_diffusion: batch_size must be >= 1");
    if (epochs < 0) throw DomainError("train_diffusion: negative epoch count");

    DiffusionTrainReport report;
    std::vector<std::size_t> order(data.size());
    const auto bs = static_cast<std::size_t>(batch_size);
    for (int e = 0; e < epochs; ++e) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const auto count = std::min(bs, order.size() - start);
            const auto batch = models::make_batch(data, std::span<const std::size_t>(order).subspan(start, count));
            const auto lg = diffusion_loss_grad(params, batch, schedule, rng);
            numkit::adam_step(opt, params.flat(), lg.grad);
            loss_sum += lg.loss;
            ++batches;
        }
        report.epoch_losses.push_back(loss_sum / batches);
    }
    return report;
}

} // namespace dcfl::diffusion
