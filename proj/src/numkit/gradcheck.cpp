#include "dcfl/numkit/gradcheck.hpp"

#include "dcfl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dcfl::numkit {

std::vector<double> finite_diff_grad(const ScalarFunction& loss_fn, std::span<const double> params, double h) {
    if (!(h > 0.0)) throw DomainError("finite_diff_grad: step h must be positive");

    std::vector<double> x(params.begin(), params.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double up = loss_fn(x);
        x[i] = saved - h;
        const double down = loss_fn(x);
        x[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericError("finite_diff_grad: non-finite loss at coordinate " + std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b, double floor) {
    if (a.size() != b.size()) throw DimensionError("relative_error: length mismatch");
    double diff = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

} // namespace dcfl::numkit
