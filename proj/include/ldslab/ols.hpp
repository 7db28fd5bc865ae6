#pragma once

#include <string>
#include <utility>

#include "ldslab/model.hpp"
#include "ldslab/spectra.hpp"

namespace ldslab {

struct OlsResult {
  MatrixXd a_hat;
  double error_frobenius = 0.0;   // |A - A_hat|_F
  double noise_error = 0.0;       // |E X-^+|_F
  double identity_residual = 0.0; // |error_frobenius - noise_error|
  double pseudo_inverse_threshold = 0.0;
  double kappa = 0.0;             // sigma_1(X-) / sigma_n(X-)
  Index rank = 0;
  bool full_rank = false;

  /// Holds on well-conditioned full-rank data; ill-conditioned bundles are
  /// roundoff dominated and report the gap instead.
  bool identity_holds(double tol = 1e-8) const {
    return full_rank && identity_residual <= tol * (1.0 + error_frobenius);
  }
};

/// A_hat = X+ X-^+ through the row-equilibrated thresholded pseudo-inverse.
/// Rank deficiency is flagged, never thrown.
OlsResult ols_fit(const DataBundle& bundle);

struct ErrorBounds {
  double lower_svd = 0.0;   // sigma_n(E X^T) sqrt(sum sigma_j^-4)
  double upper_svd = 0.0;   // sigma_1(E X^T) sqrt(sum sigma_j^-4)
  double lower_2mom = 0.0;  // sqrt(sum 1 / (n sigma_j^2))
  double upper_2mom = 0.0;  // sqrt(sum n / sigma_j^2)
  double sandwich_frob_lower = 0.0;  // |E X^T|_F / sigma_1^2
  double sandwich_frob_upper = 0.0;  // |E X^T|_F / sigma_n^2
  double combined_upper = 0.0;  // min(sqrt(sum n s1^2/sj^4), (sum n^3/sj^4)^(1/4))

  /// The deterministic pairs: lower_svd <= error <= upper_svd and the
  /// Frobenius pair, with relative slack.
  bool deterministic_hold(double error, double slack = 1e-8) const;
};

/// Throws DegenerateRows when the spectrum is flagged degenerate.
ErrorBounds error_bounds(const DataBundle& bundle,
                         const SpectrumReport<double>& spectrum);

struct ResidualColumns {
  MatrixXd columns;  // N x n, c_k = X^T (X X^T)^-1 e_k
  double norm_residual = 0.0;     // max_k | |c_k|^2 d_k^2 - 1 |
  double normal_eq_residual = 0.0;  // max |X C - I|
};

/// Throws SingularCovariance when X lacks full row rank.
ResidualColumns residual_columns(const MatrixXd& x_minus);

/// Conjugates the whole bundle by an orthogonal U and returns
/// |error(original) - error(transformed)|. Throws NotOrthogonal.
double unitary_invariance_check(const DataBundle& bundle, const MatrixXd& u);

/// Explicit error sandwich for a single Jordan block of size n with
/// eigenvalue lambda after N steps. Throws BadParameter.
std::pair<double, double> sandwich_bound_swsscs(int n, int N, double lambda);

/// Sum over t of |x_{t+1} - B x_t|^2 on the bundle.
double squared_residual(const DataBundle& bundle, const MatrixXd& b);

}  // namespace ldslab
