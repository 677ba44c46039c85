#pragma once

#include <Eigen/Dense>

namespace pathspace {

// Small dynamic vectors/matrices with stack storage. Every manifold here has
// representation dimension <= 3, but Euclidean ensembles go up to 8 coordinates,
// so cap there and avoid heap traffic in the per-step hot loops.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

}  // namespace pathspace
