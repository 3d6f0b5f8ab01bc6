#pragma once

#include "dcfl/numkit/matrix.hpp"

#include <span>

namespace dcfl::numkit {

/// Discrete KL divergence sum p_i ln(p_i / q_i) in nats.
///
/// Terms with p_i = 0 contribute nothing. If some p_i > 0 meets q_i = 0 the
/// result is +infinity (test with std::isinf); this is not an error.
/// Throws DomainError when lengths differ or either input is not a
/// probability vector (negative entries or sum off 1 by more than 1e-9).
double kl_discrete(std::span<const double> p, std::span<const double> q);

inline constexpr double kGaussianRidge = 1e-6;

/// KL(N_a || N_b) between Gaussians moment-matched to two point clouds.
/// Rows are points. Each sample needs at least dim + 2 rows; covariances get
/// a 1e-6 ridge before inversion.
double kl_gaussian_moment(const Matrix& sample_a, const Matrix& sample_b);

} // namespace dcfl::numkit
