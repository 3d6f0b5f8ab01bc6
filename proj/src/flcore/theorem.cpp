#include "dcfl/flcore/theorem.hpp"

#include "dcfl/errors.hpp"
#include "dcfl/numkit/kl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dcfl::flcore {

namespace {

constexpr double kMinMass = 1e-6;

std::vector<double> random_simplex(int dim, numkit::RngStream& rng) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double sum = 0.0;
    for (double& x : v) {
        x = -std::log(1.0 - rng.uniform());
        sum += x;
    }
    const double scale = 1.0 - dim * kMinMass;
    for (double& x : v) x = kMinMass + scale * x / sum;
    return v;
}

} // namespace

MixingBoundTerms mixing_bound_terms(std::span<const double> p, std::span<const double> q_shifted,
                                    std::span<const double> q_synthetic, std::optional<double> shift_bound) {
    if (p.size() != q_shifted.size() || p.size() != q_synthetic.size()) {
        throw DomainError("mixing_bound_terms: length mismatch");
    }
    std::vector<double> mix(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mix[i] = 0.5 * (q_shifted[i] + q_synthetic[i]);

    const double delta = shift_bound.value_or(numkit::kl_discrete(p, q_shifted));
    MixingBoundTerms t;
    t.lhs = numkit::kl_discrete(p, mix);
    t.rhs = 0.5 * (numkit::kl_discrete(p, q_synthetic) + delta);
    t.slack = t.rhs - t.lhs;
    return t;
}

Theorem1Report theorem1_check(int trials, int max_dim, numkit::RngStream& rng) {
    if (trials < 1) throw DomainError("theorem1_check: trials must be >= 1");
    if (max_dim < 2) throw DomainError("theorem1_check: max_dim must be >= 2");

    Theorem1Report report;
    report.trials = trials;
    report.max_slack = -std::numeric_limits<double>::infinity();
    report.min_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < trials; ++i) {
        const int dim = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dim - 1)));
        const auto p = random_simplex(dim, rng);
        const auto q1 = random_simplex(dim, rng);
        const auto q2 = random_simplex(dim, rng);
        const auto terms = mixing_bound_terms(p, q1, q2);
        if (terms.lhs > terms.rhs + kTheorem1Tolerance) ++report.violations;
        report.max_slack = std::max(report.max_slack, terms.slack);
        report.min_slack = std::min(report.min_slack, terms.slack);
    }
    return report;
}

} // namespace dcfl::flcore
