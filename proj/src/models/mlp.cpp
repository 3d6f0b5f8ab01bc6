#include "dcfl/models/mlp.hpp"

#include "dcfl/errors.hpp"

#include <cmath>
#include <string>

namespace dcfl::models {

using numkit::Matrix;

namespace {

void glorot_fill(std::span<double> block, int fan_in, int fan_out, numkit::RngStream& rng) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : block) w = rng.uniform(-bound, bound);
}

} // namespace

MlpParams::MlpParams(const MlpShape& shape) : shape_(shape), values_(shape.flat_size(), 0.0) {
    if (shape.d_feat < 1 || shape.hidden < 1 || shape.classes < 1) {
        throw DimensionError("MlpParams: all dimensions must be positive");
    }
}

MlpParams::MlpParams(const MlpShape& shape, std::vector<double> flat) : shape_(shape), values_(flat.begin(), flat.end()) {
    if (values_.size() != shape.flat_size()) {
        throw DimensionError("MlpParams: flat length " + std::to_string(values_.size()) + " != expected " +
                             std::to_string(shape.flat_size()));
    }
}

numkit::ConstMatrixMap MlpParams::w1() const { return {values_.data(), shape_.hidden, shape_.d_feat}; }
numkit::ConstVectorMap MlpParams::b1() const {
    return {values_.data() + shape_.hidden * shape_.d_feat, shape_.hidden};
}
numkit::ConstMatrixMap MlpParams::w2() const {
    return {values_.data() + shape_.hidden * (shape_.d_feat + 1), shape_.classes, shape_.hidden};
}
numkit::ConstVectorMap MlpParams::b2() const {
    return {values_.data() + shape_.hidden * (shape_.d_feat + 1 + shape_.classes), shape_.classes};
}
numkit::MatrixMap MlpParams::w1() { return {values_.data(), shape_.hidden, shape_.d_feat}; }
numkit::VectorMap MlpParams::b1() { return {values_.data() + shape_.hidden * shape_.d_feat, shape_.hidden}; }
numkit::MatrixMap MlpParams::w2() {
    return {values_.data() + shape_.hidden * (shape_.d_feat + 1), shape_.classes, shape_.hidden};
}
numkit::VectorMap MlpParams::b2() {
    return {values_.data() + shape_.hidden * (shape_.d_feat + 1 + shape_.classes), shape_.classes};
}

MlpParams init_mlp(const MlpShape& shape, numkit::RngStream& rng) {
    MlpParams p(shape);
    auto flat = p.flat();
    const auto n1 = static_cast<std::size_t>(shape.hidden * shape.d_feat);
    const auto n2 = static_cast<std::size_t>(shape.classes * shape.hidden);
    glorot_fill(flat.subspan(0, n1), shape.d_feat, shape.hidden, rng);
    glorot_fill(flat.subspan(n1 + static_cast<std::size_t>(shape.hidden), n2), shape.hidden, shape.classes, rng);
    return p;
}

MlpActivations mlp_forward_cached(const MlpParams& params, const Matrix& features) {
    if (features.cols() != params.shape().d_feat) {
        throw DimensionError("mlp_forward: feature length " + std::to_string(features.cols()) + " != d_feat " +
                             std::to_string(params.shape().d_feat));
    }
    MlpActivations acts;
    acts.input = features;
    acts.hidden = ((features * params.w1().transpose()).rowwise() + params.b1().transpose()).array().tanh();
    acts.logits = (acts.hidden * params.w2().transpose()).rowwise() + params.b2().transpose();
    return acts;
}

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& features) {
    return mlp_forward_cached(params, features).logits;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> features) {
    const Matrix x = numkit::ConstMatrixMap(features.data(), 1, static_cast<Eigen::Index>(features.size()));
    const Matrix logits = mlp_forward_batch(params, x);
    return {logits.data(), logits.data() + logits.size()};
}

std::vector<double> mlp_backward(const MlpParams& params, const MlpActivations& acts, const Matrix& dlogits) {
    const auto& s = params.shape();
    MlpParams grad(s);
    grad.w2() = dlogits.transpose() * acts.hidden;
    grad.b2() = dlogits.colwise().sum().transpose();
    const Matrix dpre = ((dlogits * params.w2()).array() * (1.0 - acts.hidden.array().square())).matrix();
    grad.w1() = dpre.transpose() * acts.input;
    grad.b1() = dpre.colwise().sum().transpose();
    return grad.values();
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out = logits.colwise() - logits.rowwise().maxCoeff();
    out = out.array().exp();
    out.array().colwise() /= out.rowwise().sum().array();
    return out;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
    if (static_cast<std::size_t>(logits.rows()) != labels.size()) throw DimensionError("cross_entropy: row/label mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
        total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
    }
    return total / static_cast<double>(logits.rows());
}

LossGrad mlp_loss_grad(const MlpParams& params, const Batch& batch) {
    if (batch.size() == 0) throw DomainError("mlp_loss_grad: empty batch");
    for (int y : batch.labels) {
        if (y < 0 || y >= params.shape().classes) throw DomainError("mlp_loss_grad: label out of range");
    }
    const MlpActivations acts = mlp_forward_cached(params, batch.features);
    Matrix dlogits = softmax_rows(acts.logits);
    for (std::size_t i = 0; i < batch.size(); ++i) dlogits(static_cast<Eigen::Index>(i), batch.labels[i]) -= 1.0;
    dlogits /= static_cast<double>(batch.size());

    LossGrad out;
    out.loss = cross_entropy(acts.logits, batch.labels);
    out.grad = mlp_backward(params, acts, dlogits);
    return out;
}

LossGrad mlp_loss_grad(const MlpParams& params, std::span<const data::Example> batch) {
    if (batch.empty()) throw DomainError("mlp_loss_grad: empty batch");
    return mlp_loss_grad(params, make_batch(batch));
}

int argmax(std::span<const double> values) {
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

int predict(const MlpParams& params, std::span<const double> features) {
    return argmax(mlp_forward(params, features));
}

std::vector<int> predict_batch(const MlpParams& params, const Matrix& features) {
    const Matrix logits = mlp_forward_batch(params, features);
    std::vector<int> out(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = argmax(std::span<const double>(logits.row(i).data(), static_cast<std::size_t>(logits.cols())));
    }
    return out;
}

} // namespace dcfl::models
