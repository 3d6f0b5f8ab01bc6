#include "dcfl/numkit/rng.hpp"

#include <cmath>
#include <numbers>

namespace dcfl::numkit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0x632BE59BD9B4E019ULL;
} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : state_(mix64(seed ^ mix64(stream_id + kSplitSalt))), stream_id_(stream_id) {}

std::uint64_t RngStream::next_u64() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
    // Rejection sampling on the top of the range removes modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

double RngStream::normal() noexcept {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(angle);
    return r * std::cos(angle);
}

RngStream RngStream::split(std::uint64_t key) const noexcept {
    return RngStream(mix64(state_ ^ mix64(key * kGolden + kSplitSalt)), key, true);
}

} // namespace dcfl::numkit
