#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace dcfl::numkit {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic, splittable random stream.
///
/// The generator is SplitMix64 (Weyl increment 0x9E3779B97F4A7C15 followed by
/// mix64); every derived quantity (uniform doubles, bounded integers, normal
/// deviates, shuffles) is computed here with integer arithmetic or Box-Muller
/// so that sequences do not depend on the standard library's distribution
/// implementations. A stream is single-owner; hand a `split` child to any
/// concurrent consumer.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

    [[nodiscard]] std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    [[nodiscard]] double uniform() noexcept;
    [[nodiscard]] double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). n must be positive.
    [[nodiscard]] std::uint64_t below(std::uint64_t n) noexcept;

    /// Standard normal deviate (Box-Muller, both outputs used).
    [[nodiscard]] double normal() noexcept;

    /// Child stream keyed by `key`. Depends on this stream's current position,
    /// so split before drawing when a stable child is required.
    [[nodiscard]] RngStream split(std::uint64_t key) const noexcept;

    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    [[nodiscard]] std::uint64_t state() const noexcept { return state_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    RngStream(std::uint64_t state, std::uint64_t stream_id, bool) noexcept : state_(state), stream_id_(stream_id) {}

    std::uint64_t state_;
    std::uint64_t stream_id_;
    std::optional<double> spare_normal_;
};

} // namespace dcfl::numkit
