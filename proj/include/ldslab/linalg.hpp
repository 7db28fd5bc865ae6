#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace ldslab {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

/// Relative threshold below which a row residual or singular value counts as
/// numerically zero.
template <typename Scalar>
constexpr Scalar rank_tolerance() {
  return Scalar(1e4) * std::numeric_limits<Scalar>::epsilon();
}

/// Relative cutoff for the thresholded pseudo-inverse.
template <typename Scalar>
constexpr Scalar pinv_cutoff() {
  return std::numeric_limits<Scalar>::epsilon() >= Scalar(1e-10)
             ? Scalar(1e3) * std::numeric_limits<Scalar>::epsilon()
             : Scalar(1e-12);
}

}  // namespace ldslab
