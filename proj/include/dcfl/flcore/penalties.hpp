#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/models/batch.hpp"
#include "dcfl/models/mlp.hpp"

#include <span>
#include <vector>

namespace dcfl::flcore {

// Regularizers of the baseline methods. Each add_* function returns the
// penalty value and accumulates its gradient into `grad`.

/// FedProx: (mu / 2) ||theta - anchor||^2, gradient mu (theta - anchor).
double add_prox_penalty(std::span<const double> theta, std::span<const double> anchor, double mu,
                        std::span<double> grad);

/// EWC: (lambda / 2) sum_i F_i (theta_i - anchor_i)^2, gradient lambda F_i (theta_i - anchor_i).
double add_ewc_penalty(std::span<const double> theta, std::span<const double> anchor, std::span<const double> fisher,
                       double lambda, std::span<double> grad);

/// Cross-entropy plus lambda * mean_rows KL(softmax(teacher) || softmax(student)), temperature 1.
models::LossGrad lwf_loss_grad(const models::MlpParams& student, const models::MlpParams& teacher,
                               const models::Batch& batch, double lambda);

/// The distillation term alone (no task loss).
models::LossGrad lwf_penalty_grad(const models::MlpParams& student, const models::MlpParams& teacher,
                                  const models::Batch& batch, double lambda);

/// Empirical diagonal Fisher: mean over examples of the squared per-example
/// cross-entropy gradient. Throws DomainError on empty data.
std::vector<double> ewc_fisher_estimate(const models::MlpParams& params, std::span<const data::Example> data);

} // namespace dcfl::flcore
