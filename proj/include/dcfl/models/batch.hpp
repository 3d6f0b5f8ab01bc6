#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/numkit/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dcfl::models {

/// Examples stacked row-wise for matrix-level forward/backward passes.
struct Batch {
    numkit::Matrix features;
    std::vector<int> labels;
    std::vector<int> domains;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

Batch make_batch(std::span<const data::Example> examples);
Batch make_batch(std::span<const data::Example> examples, std::span<const std::size_t> indices);

} // namespace dcfl::models
