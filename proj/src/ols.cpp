#include "ldslab/ols.hpp"

#include <algorithm>
#include <cmath>

#include "ldslab/errors.hpp"

namespace ldslab {

OlsResult ols_fit(const DataBundle& bundle) {
  const auto pinv = pseudo_inverse(bundle.x_minus());
  OlsResult out;
  out.a_hat = bundle.x_plus() * pinv.pinv;
  out.error_frobenius = (bundle.spec().matrix() - out.a_hat).norm();
  out.noise_error = (bundle.noise() * pinv.pinv).norm();
  out.identity_residual = std::abs(out.error_frobenius - out.noise_error);
  out.pseudo_inverse_threshold = pinv.relative_cutoff;
  out.rank = pinv.rank;
  out.full_rank = pinv.rank == bundle.dim();
  const VectorXd s = singular_values(bundle.x_minus());
  out.kappa = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                    : std::numeric_limits<double>::infinity();
  return out;
}

bool ErrorBounds::deterministic_hold(double error, double slack) const {
  const auto below = [&](double lo, double hi) {
    return lo <= hi * (1.0 + slack) + 1e-300;
  };
  return below(lower_svd, error) && below(error, upper_svd) &&
         below(sandwich_frob_lower, error) && below(error, sandwich_frob_upper);
}

ErrorBounds error_bounds(const DataBundle& bundle,
                         const SpectrumReport<double>& spectrum) {
  if (spectrum.degenerate) {
    throw DegenerateRows("error bounds need a full-rank data matrix");
  }
  const auto& s = spectrum.singular_values;
  const double n = static_cast<double>(s.size());
  const MatrixXd m = bundle.noise() * bundle.x_minus().transpose();
  const VectorXd sm = singular_values(m);
  const double frob = m.norm();

  const double inv4 = s.array().pow(-4.0).sum();
  const double inv2 = s.array().pow(-2.0).sum();
  ErrorBounds b;
  b.lower_svd = sm(sm.size() - 1) * std::sqrt(inv4);
  b.upper_svd = sm(0) * std::sqrt(inv4);
  b.lower_2mom = std::sqrt(inv2 / n);
  b.upper_2mom = std::sqrt(inv2 * n);
  b.sandwich_frob_lower = frob / (s(0) * s(0));
  b.sandwich_frob_upper = frob / (s(s.size() - 1) * s(s.size() - 1));
  b.combined_upper = std::min(std::sqrt(n * s(0) * s(0) * inv4),
                              std::pow(n * n * n * inv4, 0.25));
  return b;
}

ResidualColumns residual_columns(const MatrixXd& x_minus) {
  const auto rows = row_distances(x_minus);
  if (rows.degenerate) {
    throw SingularCovariance("data matrix lacks full row rank");
  }
  const auto pinv = pseudo_inverse(x_minus);
  ResidualColumns out;
  out.columns = pinv.pinv;
  for (Index k = 0; k < out.columns.cols(); ++k) {
    const double d = rows.distances(k);
    out.norm_residual = std::max(
        out.norm_residual, std::abs(out.columns.col(k).squaredNorm() * d * d - 1.0));
  }
  const MatrixXd product = x_minus * out.columns;
  out.normal_eq_residual =
      (product - MatrixXd::Identity(product.rows(), product.cols()))
          .cwiseAbs()
          .maxCoeff();
  return out;
}

double unitary_invariance_check(const DataBundle& bundle, const MatrixXd& u) {
  const Index n = bundle.dim();
  if (u.rows() != n || u.cols() != n ||
      !((u.transpose() * u - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <=
        1e-12)) {
    throw NotOrthogonal("basis change must be an orthogonal n x n matrix");
  }
  const MatrixXd a_rot = u * bundle.spec().matrix() * u.transpose();
  const DataBundle rotated(make_spec(Dense{a_rot}), u * bundle.x_minus(),
                           u * bundle.x_plus(), u * bundle.noise(),
                           bundle.seed(), bundle.trial());
  return std::abs(ols_fit(bundle).error_frobenius -
                  ols_fit(rotated).error_frobenius);
}

std::pair<double, double> sandwich_bound_swsscs(int n, int N, double lambda) {
  if (n < 1 || N <= n) {
    throw BadParameter("sandwich bound needs N > n >= 1");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw BadParameter("sandwich bound needs lambda in (0, 1)");
  }
  const double q = 4.0 * lambda * lambda;  // 4 lambda^2
  double lower_sum = 0.0;
  double upper_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double qi = std::pow(q, i);
    lower_sum += qi / static_cast<double>(N - n + i);
    upper_sum += qi * static_cast<double>(n - i + 1);
  }
  const double qn = std::pow(q, n);
  const double lower = (1.0 / (2.0 * lambda)) * std::sqrt(1.0 / (qn * n)) *
                       std::sqrt(lower_sum);
  const double upper =
      std::sqrt(n / (static_cast<double>(N) * qn * q)) * std::sqrt(upper_sum);
  return {lower, upper};
}

double squared_residual(const DataBundle& bundle, const MatrixXd& b) {
  return (bundle.x_plus() - b * bundle.x_minus()).squaredNorm();
}

}  // namespace ldslab
