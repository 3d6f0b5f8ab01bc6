#pragma once

#include "dcfl/models/batch.hpp"
#include "dcfl/numkit/matrix.hpp"
#include "dcfl/numkit/rng.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dcfl::models {

struct DenoiserShape {
    int d_feat = 2;
    int hidden = 128;
    int time_embed = 16;
    int cond_embed = 16;
    int classes = 10;
    /// 0 disables domain conditioning.
    int domains = 0;
    /// Largest admissible diffusion step.
    int max_step = 200;

    [[nodiscard]] int input_width() const noexcept { return d_feat + time_embed + cond_embed; }
    [[nodiscard]] std::size_t flat_size() const noexcept;
    friend bool operator==(const DenoiserShape&, const DenoiserShape&) = default;
};

/// Conditional epsilon-predictor: [x, time embedding, class (+ domain)
/// embedding] -> hidden -> hidden -> hidden -> d_feat, tanh activations.
///
/// Flat layout: W_in, b_in, W_h1, b_h1, W_h2, b_h2, W_out, b_out,
/// class table (classes x cond_embed), domain table (domains x cond_embed).
class DenoiserParams {
public:
    DenoiserParams() = default;
    explicit DenoiserParams(const DenoiserShape& shape);
    DenoiserParams(const DenoiserShape& shape, std::vector<double> flat);

    [[nodiscard]] const DenoiserShape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::span<const double> flat() const noexcept { return values_; }
    [[nodiscard]] std::span<double> flat() noexcept { return values_; }
    [[nodiscard]] std::vector<double> values() const { return {values_.begin(), values_.end()}; }

    [[nodiscard]] numkit::ConstMatrixMap w_in() const { return cmat(0); }
    [[nodiscard]] numkit::ConstVectorMap b_in() const { return cvec(1); }
    [[nodiscard]] numkit::ConstMatrixMap w_h1() const { return cmat(2); }
    [[nodiscard]] numkit::ConstVectorMap b_h1() const { return cvec(3); }
    [[nodiscard]] numkit::ConstMatrixMap w_h2() const { return cmat(4); }
    [[nodiscard]] numkit::ConstVectorMap b_h2() const { return cvec(5); }
    [[nodiscard]] numkit::ConstMatrixMap w_out() const { return cmat(6); }
    [[nodiscard]] numkit::ConstVectorMap b_out() const { return cvec(7); }
    [[nodiscard]] numkit::ConstMatrixMap class_table() const { return cmat(8); }
    [[nodiscard]] numkit::ConstMatrixMap domain_table() const { return cmat(9); }
    [[nodiscard]] numkit::MatrixMap w_in() { return mat(0); }
    [[nodiscard]] numkit::MatrixMap w_h1() { return mat(2); }
    [[nodiscard]] numkit::MatrixMap w_h2() { return mat(4); }
    [[nodiscard]] numkit::MatrixMap w_out() { return mat(6); }
    [[nodiscard]] numkit::MatrixMap class_table() { return mat(8); }
    [[nodiscard]] numkit::MatrixMap domain_table() { return mat(9); }

    /// Offset and (rows, cols) of block `i` in the flat layout.
    struct Block {
        std::size_t offset;
        int rows;
        int cols;
    };
    [[nodiscard]] static std::vector<Block> layout(const DenoiserShape& shape);

    friend bool operator==(const DenoiserParams&, const DenoiserParams&) = default;

private:
    [[nodiscard]] numkit::ConstMatrixMap cmat(int block) const;
    [[nodiscard]] numkit::ConstVectorMap cvec(int block) const;
    [[nodiscard]] numkit::MatrixMap mat(int block);

    DenoiserShape shape_;
    numkit::AlignedVector values_;
};

/// Glorot-uniform weights and embedding tables, zero biases.
DenoiserParams init_denoiser(const DenoiserShape& shape, numkit::RngStream& rng);

/// Sinusoidal embedding of a diffusion step: pairs (sin(n f_i), cos(n f_i))
/// with f_i = 10000^(-i / (dim / 2)).
std::vector<double> time_embedding(int step, int dim);

struct DenoiserActivations {
    numkit::Matrix input;
    numkit::Matrix h1;
    numkit::Matrix h2;
    numkit::Matrix h3;
    numkit::Matrix output;
};

/// Batched forward pass. `steps`, `labels` have one entry per row; `domains`
/// is empty when domain conditioning is off. Throws DomainError on a step
/// outside [1, max_step] or an invalid label/domain.
DenoiserActivations denoiser_forward_cached(const DenoiserParams& params, const numkit::Matrix& x_noisy,
                                            std::span<const int> steps, std::span<const int> labels,
                                            std::span<const int> domains);

std::vector<double> denoiser_forward(const DenoiserParams& params, std::span<const double> x_noisy, int step,
                                     int label, std::optional<int> domain = std::nullopt);

/// Flat gradient given dLoss/doutput for every row of a cached pass.
std::vector<double> denoiser_backward(const DenoiserParams& params, const DenoiserActivations& acts,
                                      const numkit::Matrix& doutput, std::span<const int> labels,
                                      std::span<const int> domains);

} // namespace dcfl::models
