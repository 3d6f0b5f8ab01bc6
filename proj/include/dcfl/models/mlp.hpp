#pragma once

#include "dcfl/models/batch.hpp"
#include "dcfl/numkit/matrix.hpp"
#include "dcfl/numkit/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dcfl::models {

struct MlpShape {
    int d_feat = 2;
    int hidden = 64;
    int classes = 10;

    [[nodiscard]] std::size_t flat_size() const noexcept {
        return static_cast<std::size_t>(d_feat * hidden + hidden + hidden * classes + classes);
    }
    friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

/// Parameters of the [d_feat -> hidden -> classes] tanh classifier.
///
/// Stored as one flat vector laid out W1 (hidden x d_feat, row-major), b1,
/// W2 (classes x hidden, row-major), b2. The structured accessors are views
/// into that storage, so the flat view and the structured form cannot drift.
class MlpParams {
public:
    MlpParams() = default;
    explicit MlpParams(const MlpShape& shape);
    /// Throws DimensionError if `flat` does not have shape.flat_size() entries.
    MlpParams(const MlpShape& shape, std::vector<double> flat);

    [[nodiscard]] const MlpShape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::span<const double> flat() const noexcept { return values_; }
    [[nodiscard]] std::span<double> flat() noexcept { return values_; }
    [[nodiscard]] std::vector<double> values() const { return {values_.begin(), values_.end()}; }

    [[nodiscard]] numkit::ConstMatrixMap w1() const;
    [[nodiscard]] numkit::ConstVectorMap b1() const;
    [[nodiscard]] numkit::ConstMatrixMap w2() const;
    [[nodiscard]] numkit::ConstVectorMap b2() const;
    [[nodiscard]] numkit::MatrixMap w1();
    [[nodiscard]] numkit::VectorMap b1();
    [[nodiscard]] numkit::MatrixMap w2();
    [[nodiscard]] numkit::VectorMap b2();

    friend bool operator==(const MlpParams&, const MlpParams&) = default;

private:
    MlpShape shape_;
    numkit::AlignedVector values_;
};

/// Glorot-uniform weights, zero biases.
MlpParams init_mlp(const MlpShape& shape, numkit::RngStream& rng);

struct MlpActivations {
    numkit::Matrix input;
    numkit::Matrix hidden; // post-tanh
    numkit::Matrix logits;
};

MlpActivations mlp_forward_cached(const MlpParams& params, const numkit::Matrix& features);

/// Logits for a single feature vector. Throws DimensionError on length mismatch.
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> features);
numkit::Matrix mlp_forward_batch(const MlpParams& params, const numkit::Matrix& features);

/// Flat gradient given dLoss/dlogits for every row of the cached pass.
std::vector<double> mlp_backward(const MlpParams& params, const MlpActivations& acts, const numkit::Matrix& dlogits);

numkit::Matrix softmax_rows(const numkit::Matrix& logits);

/// Mean softmax cross-entropy of logits against integer labels.
double cross_entropy(const numkit::Matrix& logits, std::span<const int> labels);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Mean cross-entropy over the batch and its gradient. Throws DomainError on an empty batch.
LossGrad mlp_loss_grad(const MlpParams& params, const Batch& batch);
LossGrad mlp_loss_grad(const MlpParams& params, std::span<const data::Example> batch);

/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> values);
int predict(const MlpParams& params, std::span<const double> features);
std::vector<int> predict_batch(const MlpParams& params, const numkit::Matrix& features);

} // namespace dcfl::models
