#include "dcfl/models/batch.hpp"

#include "dcfl/errors.hpp"

namespace dcfl::models {

namespace {

void put_row(Batch& b, Eigen::Index row, const data::Example& ex) {
    if (static_cast<Eigen::Index>(ex.features.size()) != b.features.cols()) {
        throw DimensionError("make_batch: examples have differing feature lengths");
    }
    b.features.row(row) = numkit::ConstVectorMap(ex.features.data(), b.features.cols()).transpose();
    b.labels.push_back(ex.label);
    b.domains.push_back(ex.domain);
}

} // namespace

Batch make_batch(std::span<const data::Example> examples) {
    Batch b;
    const auto cols = examples.empty() ? 0 : static_cast<Eigen::Index>(examples.front().features.size());
    b.features.resize(static_cast<Eigen::Index>(examples.size()), cols);
    b.labels.reserve(examples.size());
    b.domains.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) put_row(b, static_cast<Eigen::Index>(i), examples[i]);
    return b;
}

Batch make_batch(std::span<const data::Example> examples, std::span<const std::size_t> indices) {
    Batch b;
    const auto cols = examples.empty() ? 0 : static_cast<Eigen::Index>(examples.front().features.size());
    b.features.resize(static_cast<Eigen::Index>(indices.size()), cols);
    b.labels.reserve(indices.size());
    b.domains.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        put_row(b, static_cast<Eigen::Index>(i), examples[indices[i]]);
    }
    return b;
}

} // namespace dcfl::models
