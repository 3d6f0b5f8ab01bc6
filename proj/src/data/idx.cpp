#include "dcfl/data/idx.hpp"

#include "dcfl/errors.hpp"

#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace dcfl::data {

namespace {

constexpr int kIdxClasses = 10;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path, const char* which) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(std::string(which) + ": cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const std::string& field) {
    if (bytes.size() < offset + 4) throw FormatError(field + ": file truncated");
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

} // namespace

Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels) {
    if (images.empty()) throw FormatError("images: empty file");
    if (labels.empty()) throw FormatError("labels: empty file");

    if (read_be32(images, 0, "images.magic") != kIdxImageMagic) throw FormatError("images.magic: expected 0x00000803");
    if (read_be32(labels, 0, "labels.magic") != kIdxLabelMagic) throw FormatError("labels.magic: expected 0x00000801");

    const std::uint64_t n_images = read_be32(images, 4, "images.count");
    const std::uint64_t rows = read_be32(images, 8, "images.rows");
    const std::uint64_t cols = read_be32(images, 12, "images.cols");
    const std::uint64_t n_labels = read_be32(labels, 4, "labels.count");

    if (n_images != n_labels) {
        throw FormatError("images.count/labels.count: mismatch (" + std::to_string(n_images) + " vs " +
                          std::to_string(n_labels) + ")");
    }
    if (rows == 0 || cols == 0) throw FormatError("images.rows/images.cols: zero image dimension");
    const std::uint64_t pixels = rows * cols;
    if (images.size() < 16 + n_images * pixels) throw FormatError("images.data: file truncated");
    if (labels.size() < 8 + n_labels) throw FormatError("labels.data: file truncated");

    Dataset out(kIdxClasses, 1, static_cast<int>(pixels));
    for (std::uint64_t i = 0; i < n_images; ++i) {
        Example ex;
        ex.label = labels[8 + i];
        if (ex.label >= kIdxClasses) throw FormatError("labels.data: label " + std::to_string(ex.label) + " >= 10");
        ex.features.resize(pixels);
        const std::size_t base = 16 + i * pixels;
        for (std::uint64_t p = 0; p < pixels; ++p) ex.features[p] = images[base + p] / 255.0;
        out.add(std::move(ex));
    }
    return out;
}

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
    const auto images = read_file(images_path, "images");
    const auto labels = read_file(labels_path, "labels");
    return parse_idx(images, labels);
}

Dataset downsample_avgpool(const Dataset& dataset, int side_in, int side_out) {
    if (side_in <= 0 || side_out <= 0) throw DomainError("downsample_avgpool: sides must be positive");
    if (dataset.d_feat() != side_in * side_in) {
        throw DomainError("downsample_avgpool: d_feat " + std::to_string(dataset.d_feat()) + " != side_in^2");
    }
    if (side_in % side_out != 0) throw DomainError("downsample_avgpool: side_in not divisible by side_out");

    const int f = side_in / side_out;
    const double inv_area = 1.0 / (f * f);
    Dataset out(dataset.num_classes(), dataset.num_domains(), side_out * side_out);
    for (const Example& src : dataset) {
        Example ex;
        ex.label = src.label;
        ex.domain = src.domain;
        ex.features.assign(static_cast<std::size_t>(side_out * side_out), 0.0);
        for (int r = 0; r < side_in; ++r) {
            for (int c = 0; c < side_in; ++c) {
                ex.features[(r / f) * side_out + c / f] += src.features[r * side_in + c];
            }
        }
        for (double& v : ex.features) v *= inv_area;
        out.add(std::move(ex));
    }
    return out;
}

} // namespace dcfl::data
