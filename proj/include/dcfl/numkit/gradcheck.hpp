#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dcfl::numkit {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> finite_diff_grad(const ScalarFunction& loss_fn, std::span<const double> params, double h);

/// ||a - b|| / max(||a||, ||b||, floor). Used to compare analytic and numeric gradients.
double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-8);

} // namespace dcfl::numkit
