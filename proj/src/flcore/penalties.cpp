#include "dcfl/flcore/penalties.hpp"

#include "dcfl/errors.hpp"

#include <cmath>

namespace dcfl::flcore {

using numkit::Matrix;

double add_prox_penalty(std::span<const double> theta, std::span<const double> anchor, double mu,
                        std::span<double> grad) {
    if (theta.size() != anchor.size() || theta.size() != grad.size()) {
        throw DimensionError("add_prox_penalty: length mismatch");
    }
    double value = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double diff = theta[i] - anchor[i];
        value += diff * diff;
        grad[i] += mu * diff;
    }
    return 0.5 * mu * value;
}

double add_ewc_penalty(std::span<const double> theta, std::span<const double> anchor, std::span<const double> fisher,
                       double lambda, std::span<double> grad) {
    if (theta.size() != anchor.size() || theta.size() != fisher.size() || theta.size() != grad.size()) {
        throw DimensionError("add_ewc_penalty: length mismatch");
    }
    double value = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double diff = theta[i] - anchor[i];
        value += fisher[i] * diff * diff;
        grad[i] += lambda * fisher[i] * diff;
    }
    return 0.5 * lambda * value;
}

namespace {

// Returns lambda * mean KL(p_teacher || p_student) and writes its logit gradient.
double distill_term(const Matrix& student_logits, const Matrix& teacher_logits, double lambda, Matrix& dlogits) {
    const auto rows = static_cast<double>(student_logits.rows());
    const Matrix ps = models::softmax_rows(student_logits);
    const Matrix pt = models::softmax_rows(teacher_logits);
    double kl = 0.0;
    for (Eigen::Index i = 0; i < ps.rows(); ++i) {
        for (Eigen::Index j = 0; j < ps.cols(); ++j) {
            if (pt(i, j) > 0.0) kl += pt(i, j) * (std::log(pt(i, j)) - std::log(ps(i, j)));
        }
    }
    dlogits = (lambda / rows) * (ps - pt);
    return lambda * kl / rows;
}

} // namespace

models::LossGrad lwf_penalty_grad(const models::MlpParams& student, const models::MlpParams& teacher,
                                  const models::Batch& batch, double lambda) {
    if (batch.size() == 0) throw DomainError("lwf_penalty_grad: empty batch");
    const auto acts = models::mlp_forward_cached(student, batch.features);
    const Matrix teacher_logits = models::mlp_forward_batch(teacher, batch.features);
    Matrix dlogits;
    models::LossGrad out;
    out.loss = distill_term(acts.logits, teacher_logits, lambda, dlogits);
    out.grad = models::mlp_backward(student, acts, dlogits);
    return out;
}

models::LossGrad lwf_loss_grad(const models::MlpParams& student, const models::MlpParams& teacher,
                               const models::Batch& batch, double lambda) {
    if (batch.size() == 0) throw DomainError("lwf_loss_grad: empty batch");
    const auto acts = models::mlp_forward_cached(student, batch.features);
    const Matrix teacher_logits = models::mlp_forward_batch(teacher, batch.features);

    Matrix dlogits;
    const double distill = distill_term(acts.logits, teacher_logits, lambda, dlogits);
    const Matrix ps = models::softmax_rows(acts.logits);
    const auto rows = static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        dlogits.row(r) += ps.row(r) / rows;
        dlogits(r, batch.labels[i]) -= 1.0 / rows;
    }

    models::LossGrad out;
    out.loss = models::cross_entropy(acts.logits, batch.labels) + distill;
    out.grad = models::mlp_backward(student, acts, dlogits);
    return out;
}

std::vector<double> ewc_fisher_estimate(const models::MlpParams& params, std::span<const data::Example> data) {
    if (data.empty()) throw DomainError("ewc_fisher_estimate: empty data");
    std::vector<double> fisher(params.flat().size(), 0.0);
    for (const auto& ex : data) {
        const auto lg = models::mlp_loss_grad(params, std::span<const data::Example>(&ex, 1));
        for (std::size_t i = 0; i < fisher.size(); ++i) fisher[i] += lg.grad[i] * lg.grad[i];
    }
    const double inv = 1.0 / static_cast<double>(data.size());
    for (double& f : fisher) f *= inv;
    return fisher;
}

} // namespace dcfl::flcore
