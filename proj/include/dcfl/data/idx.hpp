#pragma once

#include "dcfl/data/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <span>

namespace dcfl::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Reads an MNIST-style IDX image/label pair. Pixels are scaled to [0, 1];
/// the result has 10 classes and one domain. Throws FormatError naming the
/// offending field.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Same as load_idx on in-memory file contents.
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);

/// Average-pools square images of side `side_in` down to `side_out`.
Dataset downsample_avgpool(const Dataset& dataset, int side_in, int side_out);

} // namespace dcfl::data
