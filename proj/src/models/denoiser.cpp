#include "dcfl/models/denoiser.hpp"

#include "dcfl/errors.hpp"

#include <cmath>
#include <string>

namespace dcfl::models {

using numkit::Matrix;

std::size_t DenoiserShape::flat_size() const noexcept {
    const auto blocks = DenoiserParams::layout(*this);
    const auto& last = blocks.back();
    return last.offset + static_cast<std::size_t>(last.rows * last.cols);
}

std::vector<DenoiserParams::Block> DenoiserParams::layout(const DenoiserShape& s) {
    const int dims[10][2] = {
        {s.hidden, s.input_width()}, {s.hidden, 1}, {s.hidden, s.hidden}, {s.hidden, 1},
        {s.hidden, s.hidden},        {s.hidden, 1}, {s.d_feat, s.hidden}, {s.d_feat, 1},
        {s.classes, s.cond_embed},   {s.domains, s.cond_embed},
    };
    std::vector<Block> blocks;
    std::size_t offset = 0;
    for (const auto& d : dims) {
        blocks.push_back({offset, d[0], d[1]});
        offset += static_cast<std::size_t>(d[0] * d[1]);
    }
    return blocks;
}

DenoiserParams::DenoiserParams(const DenoiserShape& shape) : shape_(shape) {
    if (shape.d_feat < 1 || shape.hidden < 1 || shape.classes < 1 || shape.cond_embed < 1 || shape.domains < 0 ||
        shape.max_step < 1) {
        throw DimensionError("DenoiserParams: invalid shape");
    }
    if (shape.time_embed < 2 || shape.time_embed % 2 != 0) {
        throw DimensionError("DenoiserParams: time_embed must be a positive even number");
    }
    values_.assign(shape.flat_size(), 0.0);
}

DenoiserParams::DenoiserParams(const DenoiserShape& shape, std::vector<double> flat) : DenoiserParams(shape) {
    if (flat.size() != values_.size()) {
        throw DimensionError("DenoiserParams: flat length " + std::to_string(flat.size()) + " != expected " +
                             std::to_string(values_.size()));
    }
    values_.assign(flat.begin(), flat.end());
}

numkit::ConstMatrixMap DenoiserParams::cmat(int block) const {
    const auto b = layout(shape_)[static_cast<std::size_t>(block)];
    return {values_.data() + b.offset, b.rows, b.cols};
}

numkit::ConstVectorMap DenoiserParams::cvec(int block) const {
    const auto b = layout(shape_)[static_cast<std::size_t>(block)];
    return {values_.data() + b.offset, b.rows};
}

numkit::MatrixMap DenoiserParams::mat(int block) {
    const auto b = layout(shape_)[static_cast<std::size_t>(block)];
    return {values_.data() + b.offset, b.rows, b.cols};
}

DenoiserParams init_denoiser(const DenoiserShape& shape, numkit::RngStream& rng) {
    DenoiserParams p(shape);
    const auto blocks = DenoiserParams::layout(shape);
    auto flat = p.flat();
    // Weight matrices and embedding tables; the odd blocks are biases.
    for (int i : {0, 2, 4, 6, 8, 9}) {
        const auto& b = blocks[static_cast<std::size_t>(i)];
        const double bound = std::sqrt(6.0 / (b.rows + b.cols));
        for (auto& w : flat.subspan(b.offset, static_cast<std::size_t>(b.rows * b.cols))) w = rng.uniform(-bound, bound);
    }
    return p;
}

std::vector<double> time_embedding(int step, int dim) {
    const int half = dim / 2;
    std::vector<double> emb(static_cast<std::size_t>(dim), 0.0);
    for (int i = 0; i < half; ++i) {
        const double freq = std::pow(10000.0, -static_cast<double>(i) / half);
        emb[static_cast<std::size_t>(2 * i)] = std::sin(step * freq);
        emb[static_cast<std::size_t>(2 * i + 1)] = std::cos(step * freq);
    }
    return emb;
}

DenoiserActivations denoiser_forward_cached(const DenoiserParams& params, const Matrix& x_noisy,
                                            std::span<const int> steps, std::span<const int> labels,
                                            std::span<const int> domains) {
    const auto& s = params.shape();
    const auto rows = x_noisy.rows();
    if (x_noisy.cols() != s.d_feat) throw DimensionError("denoiser_forward: input length != d_feat");
    if (steps.size() != static_cast<std::size_t>(rows) || labels.size() != static_cast<std::size_t>(rows)) {
        throw DimensionError("denoiser_forward: steps/labels must have one entry per row");
    }
    const bool use_domain = s.domains > 0;
    if (use_domain && domains.size() != static_cast<std::size_t>(rows)) {
        throw DimensionError("denoiser_forward: domains must have one entry per row");
    }

    DenoiserActivations acts;
    acts.input.resize(rows, s.input_width());
    acts.input.leftCols(s.d_feat) = x_noisy;
    const auto cls = params.class_table();
    const auto dom = params.domain_table();
    for (Eigen::Index i = 0; i < rows; ++i) {
        const int n = steps[static_cast<std::size_t>(i)];
        if (n < 1 || n > s.max_step) {
            throw DomainError("denoiser_forward: step " + std::to_string(n) + " outside [1, " +
                              std::to_string(s.max_step) + "]");
        }
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= s.classes) throw DomainError("denoiser_forward: label out of range");
        const auto emb = time_embedding(n, s.time_embed);
        acts.input.row(i).segment(s.d_feat, s.time_embed) =
            numkit::ConstVectorMap(emb.data(), s.time_embed).transpose();
        auto cond = acts.input.row(i).segment(s.d_feat + s.time_embed, s.cond_embed);
        cond = cls.row(y);
        if (use_domain) {
            const int d = domains[static_cast<std::size_t>(i)];
            if (d < 0 || d >= s.domains) throw DomainError("denoiser_forward: domain out of range");
            cond += dom.row(d);
        }
    }

    acts.h1 = ((acts.input * params.w_in().transpose()).rowwise() + params.b_in().transpose()).array().tanh();
    acts.h2 = ((acts.h1 * params.w_h1().transpose()).rowwise() + params.b_h1().transpose()).array().tanh();
    acts.h3 = ((acts.h2 * params.w_h2().transpose()).rowwise() + params.b_h2().transpose()).array().tanh();
    acts.output = (acts.h3 * params.w_out().transpose()).rowwise() + params.b_out().transpose();
    return acts;
}

std::vector<double> denoiser_forward(const DenoiserParams& params, std::span<const double> x_noisy, int step,
                                     int label, std::optional<int> domain) {
    const Matrix x = numkit::ConstMatrixMap(x_noisy.data(), 1, static_cast<Eigen::Index>(x_noisy.size()));
    const int steps[] = {step};
    const int labels[] = {label};
    const int domains[] = {domain.value_or(0)};
    const bool use_domain = params.shape().domains > 0;
    const auto acts = denoiser_forward_cached(params, x, steps, labels,
                                              use_domain ? std::span<const int>(domains) : std::span<const int>());
    return {acts.output.data(), acts.output.data() + acts.output.size()};
}

std::vector<double> denoiser_backward(const DenoiserParams& params, const DenoiserActivations& acts,
                                      const Matrix& doutput, std::span<const int> labels,
                                      std::span<const int> domains) {
    const auto& s = params.shape();
    const auto blocks = DenoiserParams::layout(s);
    numkit::AlignedVector grad(params.flat().size(), 0.0);
    auto gmat = [&](int i) {
        const auto& b = blocks[static_cast<std::size_t>(i)];
        return numkit::MatrixMap(grad.data() + b.offset, b.rows, b.cols);
    };
    auto gvec = [&](int i) {
        const auto& b = blocks[static_cast<std::size_t>(i)];
        return numkit::VectorMap(grad.data() + b.offset, b.rows);
    };

    gmat(6) = doutput.transpose() * acts.h3;
    gvec(7) = doutput.colwise().sum().transpose();

    Matrix da3 = ((doutput * params.w_out()).array() * (1.0 - acts.h3.array().square())).matrix();
    gmat(4) = da3.transpose() * acts.h2;
    gvec(5) = da3.colwise().sum().transpose();

    Matrix da2 = ((da3 * params.w_h2()).array() * (1.0 - acts.h2.array().square())).matrix();
    gmat(2) = da2.transpose() * acts.h1;
    gvec(3) = da2.colwise().sum().transpose();

    Matrix da1 = ((da2 * params.w_h1()).array() * (1.0 - acts.h1.array().square())).matrix();
    gmat(0) = da1.transpose() * acts.input;
    gvec(1) = da1.colwise().sum().transpose();

    const Matrix dcond = da1 * params.w_in().rightCols(s.cond_embed);
    auto gcls = gmat(8);
    auto gdom = gmat(9);
    for (Eigen::Index i = 0; i < dcond.rows(); ++i) {
        gcls.row(labels[static_cast<std::size_t>(i)]) += dcond.row(i);
        if (s.domains > 0) gdom.row(domains[static_cast<std::size_t>(i)]) += dcond.row(i);
    }
    return {grad.begin(), grad.end()};
}

} // namespace dcfl::models
