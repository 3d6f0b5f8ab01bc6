#include "dcfl/numkit/kl.hpp"

#include "dcfl/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dcfl::numkit {

namespace {

void check_simplex(std::span<const double> v, const char* name) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw DomainError(std::string("kl_discrete: ") + name + " has a negative or non-finite entry");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError(std::string("kl_discrete: ") + name + " does not sum to 1");
    }
}

struct GaussianFit {
    Vector mean;
    Matrix covariance;
};

GaussianFit fit(const Matrix& sample) {
    const auto n = static_cast<double>(sample.rows());
    GaussianFit g;
    g.mean = sample.colwise().mean().transpose();
    const Matrix centered = sample.rowwise() - g.mean.transpose();
    g.covariance = (centered.transpose() * centered) / n;
    g.covariance.diagonal().array() += kGaussianRidge;
    return g;
}

} // namespace

double kl_discrete(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DomainError("kl_discrete: length mismatch");
    if (p.empty()) throw DomainError("kl_discrete: empty distribution");
    check_simplex(p, "p");
    check_simplex(q, "q");

    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl < 0.0 ? 0.0 : kl; // rounding can dip a hair below zero
}

double kl_gaussian_moment(const Matrix& sample_a, const Matrix& sample_b) {
    if (sample_a.cols() != sample_b.cols()) throw DimensionError("kl_gaussian_moment: dimension mismatch");
    const auto dim = sample_a.cols();
    if (dim == 0) throw DomainError("kl_gaussian_moment: zero-dimensional samples");
    if (sample_a.rows() < dim + 2 || sample_b.rows() < dim + 2) {
        throw DomainError("kl_gaussian_moment: need at least dim + 2 = " + std::to_string(dim + 2) +
                          " points per sample");
    }

    const GaussianFit a = fit(sample_a);
    const GaussianFit b = fit(sample_b);

    const Eigen::LLT<Matrix> chol_b(b.covariance);
    const Eigen::LLT<Matrix> chol_a(a.covariance);
    if (chol_a.info() != Eigen::Success || chol_b.info() != Eigen::Success) {
        throw NumericError("kl_gaussian_moment: covariance not positive definite");
    }

    const Vector diff = b.mean - a.mean;
    const double trace_term = chol_b.solve(a.covariance).trace();
    const double mahalanobis = diff.dot(chol_b.solve(diff));
    const double logdet_a = 2.0 * chol_a.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double logdet_b = 2.0 * chol_b.matrixL().toDenseMatrix().diagonal().array().log().sum();

    const double kl = 0.5 * (trace_term + mahalanobis - static_cast<double>(dim) + logdet_b - logdet_a);
    return kl < 0.0 ? 0.0 : kl;
}

} // namespace dcfl::numkit
