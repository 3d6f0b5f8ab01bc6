#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace dcfl::numkit {

// Row-major dense storage; row i of a batch matrix is example i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<Vector>;
using ConstVectorMap = Eigen::Map<const Vector>;

// Parameter storage. Eigen picks its summation order from pointer alignment,
// so a fixed base alignment keeps results bitwise reproducible across runs.
using AlignedVector = std::vector<double, Eigen::aligned_allocator<double>>;

inline bool all_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
}

} // namespace dcfl::numkit
