#include "dcfl/data/dataset.hpp"

#include "dcfl/errors.hpp"

#include <string>

namespace dcfl::data {

Dataset::Dataset(int num_classes, int num_domains, int d_feat)
    : num_classes_(num_classes), num_domains_(num_domains), d_feat_(d_feat) {
    if (num_classes < 1 || num_domains < 1 || d_feat < 1) {
        throw DomainError("Dataset: classes, domains and d_feat must be positive");
    }
}

void Dataset::add(Example example) {
    if (static_cast<int>(example.features.size()) != d_feat_) {
        throw DimensionError("Dataset::add: feature length " + std::to_string(example.features.size()) +
                             " != d_feat " + std::to_string(d_feat_));
    }
    if (example.label < 0 || example.label >= num_classes_) {
        throw DomainError("Dataset::add: label " + std::to_string(example.label) + " out of range");
    }
    if (example.domain < 0 || example.domain >= num_domains_) {
        throw DomainError("Dataset::add: domain " + std::to_string(example.domain) + " out of range");
    }
    examples_.push_back(std::move(example));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out(num_classes_, num_domains_, d_feat_);
    out.examples_.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= examples_.size()) throw DomainError("Dataset::subset: index out of range");
        out.examples_.push_back(examples_[i]);
    }
    return out;
}

} // namespace dcfl::data
