#pragma once

#include <span>
#include <vector>

namespace dcfl::diffusion {

/// beta_n, alpha_n = 1 - beta_n and alpha_bar_n = prod_{s <= n} alpha_s,
/// stored zero-based: index n - 1 holds step n.
class NoiseSchedule {
public:
    /// Throws DomainError unless every beta lies in (0, 1).
    explicit NoiseSchedule(std::vector<double> betas);

    [[nodiscard]] int steps() const noexcept { return static_cast<int>(beta_.size()); }
    [[nodiscard]] double beta(int n) const { return beta_.at(static_cast<std::size_t>(n - 1)); }
    [[nodiscard]] double alpha(int n) const { return alpha_.at(static_cast<std::size_t>(n - 1)); }
    [[nodiscard]] double alpha_bar(int n) const { return alpha_bar_.at(static_cast<std::size_t>(n - 1)); }

    [[nodiscard]] std::span<const double> betas() const noexcept { return beta_; }
    [[nodiscard]] std::span<const double> alphas() const noexcept { return alpha_; }
    [[nodiscard]] std::span<const double> alpha_bars() const noexcept { return alpha_bar_; }

private:
    std::vector<double> beta_;
    std::vector<double> alpha_;
    std::vector<double> alpha_bar_;
};

inline constexpr int kDefaultSteps = 200;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

/// Betas linearly spaced from beta_start to beta_end inclusive (N = 1 gives beta_start).
NoiseSchedule make_linear_schedule(int steps = kDefaultSteps, double beta_start = kDefaultBetaStart,
                                   double beta_end = kDefaultBetaEnd);

} // namespace dcfl::diffusion
