#pragma once

#include "dcfl/numkit/rng.hpp"

#include <optional>
#include <span>

namespace dcfl::flcore {

/// Both sides of the mixing bound
///   KL(p || (q1 + q2) / 2) <= (KL(p || q2) + Delta) / 2,  Delta >= KL(p || q1).
struct MixingBoundTerms {
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs - lhs; non-negative when the bound holds.
    double slack = 0.0;
};

/// Evaluates the bound with Delta = `shift_bound`, or KL(p || q1) when absent.
MixingBoundTerms mixing_bound_terms(std::span<const double> p, std::span<const double> q_shifted,
                                    std::span<const double> q_synthetic,
                                    std::optional<double> shift_bound = std::nullopt);

struct Theorem1Report {
    int trials = 0;
    int violations = 0;
    /// Largest and smallest rhs - lhs seen.
    double max_slack = 0.0;
    double min_slack = 0.0;
};

inline constexpr double kTheorem1Tolerance = 1e-9;

/// Brute-force check of the bound on random simplex triples with dimension
/// in [2, max_dim] and every entry >= 1e-6. A trial violates when
/// lhs > rhs + 1e-9.
Theorem1Report theorem1_check(int trials, int max_dim, numkit::RngStream& rng);

} // namespace dcfl::flcore
