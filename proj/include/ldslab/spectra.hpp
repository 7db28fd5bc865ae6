#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ldslab/errors.hpp"
#include "ldslab/linalg.hpp"

namespace ldslab {

// Row-space statistics of an n x N data matrix whose rows are y_1..y_n.
// Everything here is a free function over Eigen expressions, templated on
// the scalar type.

template <typename Scalar>
struct SampleCovariance {
  Matrix<Scalar> sigma;  // X X^T, entries <y_j, y_k>
  Index n = 0;
  Index N = 0;
};

template <typename Derived>
SampleCovariance<typename Derived::Scalar> sample_covariance(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> sigma = x * x.transpose();
  sigma = (Scalar(0.5) * (sigma + sigma.transpose())).eval();
  return {std::move(sigma), x.rows(), x.cols()};
}

/// Eigenvalues of a symmetric matrix in descending order.
template <typename Derived>
Vector<typename Derived::Scalar> descending_eigenvalues(
    const Eigen::MatrixBase<Derived>& symmetric) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(symmetric,
                                                       Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

/// Singular values in descending order. Column-pivoted QR preconditioning
/// keeps small singular values accurate when rows differ wildly in scale.
template <typename Derived>
Vector<typename Derived::Scalar> singular_values(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Matrix<Scalar>, Eigen::ColPivHouseholderQRPreconditioner> svd(
      x);
  return svd.singularValues();
}

template <typename Scalar>
struct RowDistances {
  Vector<Scalar> distances;  // d(y_j, n_j), zero where degenerate
  bool degenerate = false;
};

/// Distance of every row to the span of the remaining rows, through a
/// rank-revealing QR of the other rows (no Gram matrix is formed).
template <typename Derived>
RowDistances<typename Derived::Scalar> row_distances(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  const Index N = x.cols();
  RowDistances<Scalar> out;
  out.distances = Vector<Scalar>::Zero(n);
  for (Index j = 0; j < n; ++j) {
    Vector<Scalar> yj = x.row(j).transpose();
    const Scalar norm_j = yj.norm();
    if (n == 1) {
      out.distances(j) = norm_j;
    } else {
      Matrix<Scalar> others(N, n - 1);
      for (Index k = 0, c = 0; k < n; ++k) {
        if (k != j) others.col(c++) = x.row(k).transpose();
      }
      // Equilibrate columns so the rank decision is scale-free.
      Vector<Scalar> scale = others.colwise().norm().transpose();
      for (Index c = 0; c < others.cols(); ++c) {
        if (scale(c) > Scalar(0)) others.col(c) /= scale(c);
      }
      Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(others);
      qr.setThreshold(rank_tolerance<Scalar>());
      const Index r = qr.rank();
      Vector<Scalar> z = qr.householderQ().adjoint() * yj;
      out.distances(j) = z.tail(N - r).norm();
    }
    if (!(out.distances(j) > rank_tolerance<Scalar>() * norm_j)) {
      out.degenerate = true;
    }
  }
  if (out.degenerate) out.distances.setZero();
  return out;
}

template <typename Scalar>
struct SpectrumReport {
  Vector<Scalar> eigenvalues;      // lambda_1 >= ... >= lambda_n of X X^T
  Vector<Scalar> singular_values;  // sigma_1 >= ... >= sigma_n of X
  Vector<Scalar> distances;        // d(y_j, n_j)
  bool degenerate = false;

  /// sum_j sigma_j^-2
  Scalar inverse_singular_moment() const {
    return singular_values.array().square().inverse().sum();
  }
  /// sum_j d_j^-2
  Scalar inverse_distance_moment() const {
    return distances.array().square().inverse().sum();
  }
};

template <typename Derived>
SpectrumReport<typename Derived::Scalar> spectrum(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  SpectrumReport<Scalar> report;
  report.eigenvalues = descending_eigenvalues(sample_covariance(x).sigma);
  report.singular_values = singular_values(x);
  auto rows = row_distances(x);
  report.distances = std::move(rows.distances);
  report.degenerate = rows.degenerate;
  return report;
}

/// Removes from v its component in the span of every row except j.
template <typename Derived, typename VecDerived>
Vector<typename Derived::Scalar> project_off_hyperplane(
    const Eigen::MatrixBase<Derived>& x, Index j,
    const Eigen::MatrixBase<VecDerived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  Vector<Scalar> out = v;
  if (n == 1) return out;
  Matrix<Scalar> others(x.cols(), n - 1);
  for (Index k = 0, c = 0; k < n; ++k) {
    if (k != j) others.col(c++) = x.row(k).transpose();
  }
  Eigen::HouseholderQR<Matrix<Scalar>> qr(others);
  const Matrix<Scalar> q =
      qr.householderQ() * Matrix<Scalar>::Identity(x.cols(), n - 1);
  for (int pass = 0; pass < 2; ++pass) out -= q * (q.transpose() * out);
  return out;
}

template <typename Scalar>
struct GershgorinDiscs {
  Vector<Scalar> centers;  // <y_j, y_j>
  Vector<Scalar> radii;    // sum_{k != j} |<y_j, y_k>|
  Vector<Scalar> eigenvalues;
  bool contains_all = false;
  Scalar max_radius_ratio = Scalar(0);  // max_j radius_j / center_j
};

template <typename Scalar>
GershgorinDiscs<Scalar> gershgorin(const SampleCovariance<Scalar>& cov) {
  const auto& s = cov.sigma;
  const Index n = s.rows();
  GershgorinDiscs<Scalar> out;
  out.centers = s.diagonal();
  out.radii = s.cwiseAbs().rowwise().sum() - s.diagonal().cwiseAbs();
  out.eigenvalues = descending_eigenvalues(s);
  const Scalar slack = Scalar(n) * Scalar(64) *
                       std::numeric_limits<Scalar>::epsilon() *
                       std::max(out.eigenvalues.cwiseAbs().maxCoeff(), Scalar(0));
  out.contains_all = true;
  for (Index i = 0; i < n; ++i) {
    bool inside = false;
    for (Index j = 0; j < n && !inside; ++j) {
      inside = std::abs(out.eigenvalues(i) - out.centers(j)) <=
               out.radii(j) + slack;
    }
    out.contains_all = out.contains_all && inside;
  }
  for (Index j = 0; j < n; ++j) {
    if (out.centers(j) > Scalar(0)) {
      out.max_radius_ratio =
          std::max(out.max_radius_ratio, out.radii(j) / out.centers(j));
    }
  }
  return out;
}

template <typename Scalar>
struct InterlacingReport {
  Index removed = 0;
  Vector<Scalar> full;  // eigenvalues of Sigma_n
  Vector<Scalar> sub;   // eigenvalues of Sigma_{n-k}
  Scalar min_margin = Scalar(0);  // min over both inequality chains
  bool holds = false;
};

/// Cauchy interlacing for the trailing principal submatrix obtained by
/// removing the first k rows and columns:
///   lambda_i(Sigma_n) >= lambda_i(Sigma_{n-k}) >= lambda_{i+k}(Sigma_n).
template <typename Scalar>
InterlacingReport<Scalar> interlacing_check(const SampleCovariance<Scalar>& cov,
                                            Index k) {
  const Index n = cov.sigma.rows();
  if (k < 1 || k >= n) {
    throw BadParameter("interlacing needs 1 <= k < n");
  }
  InterlacingReport<Scalar> out;
  out.removed = k;
  out.full = descending_eigenvalues(cov.sigma);
  out.sub = descending_eigenvalues(cov.sigma.bottomRightCorner(n - k, n - k));
  Scalar margin = std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < n - k; ++i) {
    margin = std::min(margin, out.full(i) - out.sub(i));
    margin = std::min(margin, out.sub(i) - out.full(i + k));
  }
  out.min_margin = margin;
  out.holds = margin >= -Scalar(1e-8) * out.full(0);
  return out;
}

template <typename Scalar>
struct PseudoInverse {
  Matrix<Scalar> pinv;  // N x n
  Index rank = 0;
  Scalar relative_cutoff = Scalar(0);
  Scalar condition = Scalar(0);  // of the row-equilibrated matrix
};

/// Thresholded Moore-Penrose inverse of a wide matrix. Rows are scaled to
/// unit norm first, X = D Z, and X^+ = Z^+ D^-1 for full row rank; the
/// cutoff applies to the singular values of Z.
template <typename Derived>
PseudoInverse<typename Derived::Scalar> pseudo_inverse(
    const Eigen::MatrixBase<Derived>& x,
    typename Derived::Scalar relative_cutoff =
        pinv_cutoff<typename Derived::Scalar>()) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  Vector<Scalar> d = x.rowwise().norm();
  Matrix<Scalar> z = x;
  for (Index j = 0; j < n; ++j) {
    if (d(j) > Scalar(0)) {
      z.row(j) /= d(j);
    } else {
      d(j) = Scalar(1);
    }
  }
  Eigen::JacobiSVD<Matrix<Scalar>, Eigen::ColPivHouseholderQRPreconditioner> svd(
      z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  PseudoInverse<Scalar> out;
  out.relative_cutoff = relative_cutoff;
  const Scalar cut = relative_cutoff * s(0);
  Vector<Scalar> inv = Vector<Scalar>::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) {
      inv(i) = Scalar(1) / s(i);
      ++out.rank;
    }
  }
  out.condition = s(s.size() - 1) > Scalar(0)
                      ? s(0) / s(s.size() - 1)
                      : std::numeric_limits<Scalar>::infinity();
  out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() *
             d.cwiseInverse().asDiagonal();
  return out;
}

template <typename Scalar>
struct PrecisionReport {
  Matrix<Scalar> precision;          // V = Sigma^-1, entries v_{j,k}
  Vector<Scalar> residual_lin1;      // |sum_{k!=j} v_jk <y_k,y_j> - (1 - v_jj |y_j|^2)|
  Matrix<Scalar> residual_lin2;      // |sum_k v_jk <y_k,y_l>| |y_j|/|y_l|, l != j
  Vector<Scalar> diag_vs_distance;   // |v_jj - d_j^-2| / v_jj
  Vector<Scalar> off_diagonal_sum;   // sum_{k!=j} v_jk <y_k,y_j>, never positive
  Vector<Scalar> distances;
  Scalar kappa = Scalar(0);          // |Sigma| |Sigma^-1| (spectral)
  Scalar tolerance = Scalar(0);      // 1e-7 kappa

  Scalar max_residual() const {
    return std::max({residual_lin1.maxCoeff(), residual_lin2.maxCoeff(),
                     diag_vs_distance.maxCoeff()});
  }
  bool within_tolerance() const { return max_residual() <= tolerance; }
  bool sign_property(Scalar tol = Scalar(1e-10)) const {
    return off_diagonal_sum.maxCoeff() <= tol;
  }
};

/// Precision matrix of X X^T and the linear constraints it satisfies.
/// The factorization runs on the correlation form D^-1 Sigma D^-1.
/// Throws SingularCovariance when X lacks full row rank.
template <typename Derived>
PrecisionReport<typename Derived::Scalar> precision_constraints(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  auto rows = row_distances(x);
  if (rows.degenerate) {
    throw SingularCovariance("data matrix lacks full row rank");
  }
  const Matrix<Scalar> sigma = sample_covariance(x).sigma;
  const Vector<Scalar> d = sigma.diagonal().cwiseSqrt();
  const Matrix<Scalar> corr =
      d.cwiseInverse().asDiagonal() * sigma * d.cwiseInverse().asDiagonal();
  Eigen::LDLT<Matrix<Scalar>> ldlt(corr);
  if (ldlt.info() != Eigen::Success) {
    throw SingularCovariance("covariance factorization failed");
  }
  const Matrix<Scalar> corr_inv =
      ldlt.solve(Matrix<Scalar>::Identity(n, n));
  PrecisionReport<Scalar> out;
  out.precision = d.cwiseInverse().asDiagonal() * corr_inv *
                  d.cwiseInverse().asDiagonal();
  out.precision = (Scalar(0.5) * (out.precision + out.precision.transpose())).eval();
  out.distances = rows.distances;

  const Matrix<Scalar> product = out.precision * sigma;  // V Sigma, ideally I
  out.residual_lin1.resize(n);
  out.off_diagonal_sum.resize(n);
  out.diag_vs_distance.resize(n);
  out.residual_lin2 = Matrix<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const Scalar diag_term = out.precision(j, j) * sigma(j, j);
    out.off_diagonal_sum(j) = product(j, j) - diag_term;
    out.residual_lin1(j) =
        std::abs(out.off_diagonal_sum(j) - (Scalar(1) - diag_term));
    for (Index l = 0; l < n; ++l) {
      // Measured in correlation units so rows of different scale compare.
      if (l != j) out.residual_lin2(j, l) = std::abs(product(j, l)) * d(j) / d(l);
    }
    const Scalar inv_d2 = Scalar(1) / (rows.distances(j) * rows.distances(j));
    out.diag_vs_distance(j) =
        std::abs(out.precision(j, j) - inv_d2) / out.precision(j, j);
  }
  const auto sv = descending_eigenvalues(sigma);
  out.kappa = sv(0) / sv(n - 1);
  if (!(out.kappa > Scalar(0)) || !std::isfinite(static_cast<double>(out.kappa))) {
    out.kappa = Scalar(1) / rank_tolerance<Scalar>();
  }
  out.tolerance = Scalar(1e-7) * out.kappa;
  return out;
}

template <typename Scalar>
struct Precision2d {
  Scalar v11, v12, v22;

  /// Residuals of the four defining equations
  ///   v11 a + v12 c = 1,  v22 b + v12 c = 1,
  ///   v11 c + v12 b = 0,  v12 a + v22 c = 0
  /// for a = |y1|^2, b = |y2|^2, c = <y1, y2>.
  std::array<Scalar, 4> residuals(Scalar a, Scalar b, Scalar c) const {
    return {v11 * a + v12 * c - Scalar(1), v22 * b + v12 * c - Scalar(1),
            v11 * c + v12 * b, v12 * a + v22 * c};
  }
};

template <typename Scalar>
Precision2d<Scalar> solve_precision_2d(Scalar norm1_sq, Scalar norm2_sq,
                                       Scalar inner) {
  const Scalar det = norm1_sq * norm2_sq - inner * inner;
  if (!(det > rank_tolerance<Scalar>() * norm1_sq * norm2_sq)) {
    throw SingularGram("2x2 Gram matrix is singular");
  }
  return {norm2_sq / det, -inner / det, norm1_sq / det};
}

template <typename Scalar>
struct SvdFactorization {
  Matrix<Scalar> u;                // n x n
  Vector<Scalar> singular_values;  // descending
  Matrix<Scalar> v;                // N x n, v_i = X^T u_i / sigma_i
  Scalar reconstruction_residual = Scalar(0);  // |X - U S V^T|_F / |X|_F
};

/// Throws DegenerateRows when X lacks full row rank.
template <typename Derived>
SvdFactorization<typename Derived::Scalar> svd_factorization(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Matrix<Scalar>, Eigen::ColPivHouseholderQRPreconditioner> svd(
      x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > rank_tolerance<Scalar>() * s(0))) {
    throw DegenerateRows("data matrix lacks full row rank");
  }
  SvdFactorization<Scalar> out;
  out.u = svd.matrixU();
  out.singular_values = s;
  out.v = x.transpose() * out.u * s.cwiseInverse().asDiagonal();
  out.reconstruction_residual =
      (x - out.u * s.asDiagonal() * svd.matrixV().transpose()).norm() / x.norm();
  return out;
}

template <typename Scalar>
struct MartingaleStats {
  Scalar sigma_max = Scalar(0);        // sigma_1(E X^T)
  Scalar sigma_min = Scalar(0);        // sigma_n(E X^T)
  Scalar frobenius = Scalar(0);        // |E X^T|_F
  Scalar deterministic_bound = Scalar(0);  // sigma_1(E) sigma_1(X)
  Scalar sqrt_n_ratio = Scalar(0);     // sigma_1(E X^T) / (sqrt(n) sigma_1(X))
  bool within_bound = false;
};

template <typename DerivedE, typename DerivedX>
MartingaleStats<typename DerivedX::Scalar> martingale_stats(
    const Eigen::MatrixBase<DerivedE>& e, const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedX::Scalar;
  if (e.rows() != x.rows() || e.cols() != x.cols()) {
    throw BadParameter("noise and data matrices must have the same shape");
  }
  const Matrix<Scalar> m = e * x.transpose();
  const Vector<Scalar> sm = singular_values(m);
  const Scalar s1x = singular_values(x)(0);
  const Scalar s1e = singular_values(e)(0);
  MartingaleStats<Scalar> out;
  out.sigma_max = sm(0);
  out.sigma_min = sm(sm.size() - 1);
  out.frobenius = m.norm();
  out.deterministic_bound = s1e * s1x;
  out.sqrt_n_ratio = sm(0) / (std::sqrt(Scalar(x.rows())) * s1x);
  out.within_bound = out.sigma_max <= out.deterministic_bound *
                                          (Scalar(1) + Scalar(1e-12));
  return out;
}

}  // namespace ldslab
