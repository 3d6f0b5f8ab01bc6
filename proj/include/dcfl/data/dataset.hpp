#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcfl::data {

struct Example {
    std::vector<double> features;
    int label = 0;
    int domain = 0;

    friend bool operator==(const Example&, const Example&) = default;
};

/// Labelled feature vectors with fixed metadata. Insertion order is the
/// iteration order.
class Dataset {
public:
    Dataset() = default;
    Dataset(int num_classes, int num_domains, int d_feat);

    /// Throws DimensionError on a feature-length mismatch and DomainError on
    /// an out-of-range label or domain.
    void add(Example example);

    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

    [[nodiscard]] std::size_t size() const noexcept { return examples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return examples_.empty(); }
    [[nodiscard]] const Example& operator[](std::size_t i) const { return examples_[i]; }
    [[nodiscard]] const std::vector<Example>& examples() const noexcept { return examples_; }
    [[nodiscard]] int num_classes() const noexcept { return num_classes_; }
    [[nodiscard]] int num_domains() const noexcept { return num_domains_; }
    [[nodiscard]] int d_feat() const noexcept { return d_feat_; }

    [[nodiscard]] auto begin() const noexcept { return examples_.begin(); }
    [[nodiscard]] auto end() const noexcept { return examples_.end(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    int num_classes_ = 0;
    int num_domains_ = 1;
    int d_feat_ = 0;
    std::vector<Example> examples_;
};

} // namespace dcfl::data
