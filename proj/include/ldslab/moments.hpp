#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ldslab {

// Closed-form moments of data-matrix entries and inner products. All time
// indexing follows simulate(): X- holds x_0 = 0, x_1, ..., x_{N-1}, so every
// row of X- carries N-1 random entries.

struct MomentOracle {
  double lambda = 0.0;
  double rho = 0.0;
  int n = 1;
  int N = 2;

  /// 1 / (1 - lambda^2)
  double c2() const;
  /// 1 / (1 - lambda^4)
  double c4() const;
};

/// E<y_k, y_k> for a diagonal (scalar AR(1)) row with eigenvalue lambda:
/// sum_{i=1}^{N-1} sum_{t=1}^{i} lambda^(2(i-t)).
double hermitian_row_mean(double lambda, int N);

struct CrossMoment {
  double mean = 0.0;           // always zero: independent centered rows
  double second_moment = 0.0;  // E<y_k, y_j>^2
};

/// Rows driven by independent noise with eigenvalues lambda and rho. The
/// second moment is sum_{i,i'} C_lambda(i,i') C_rho(i,i') with
/// C(i,i') = lambda^|i-i'| (1 - lambda^(2 min(i,i'))) / (1 - lambda^2); the
/// lag terms i != i' are kept.
CrossMoment hermitian_cross_second_moment(double lambda, double rho, int N);

struct DiagonalMoment {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;  // 2 sum_{i,i'} C(i,i')^2
};

DiagonalMoment hermitian_diagonal_moments(double lambda, int N);

/// Variance of entry (j, n-j+1) of a Jordan-block data matrix, i.e. of row j
/// once the noise has had time to reach it from the bottom coordinate:
/// sum_{s=0}^{n-j} sum_{m=0}^{s} C(s,m)^2 lambda^(2(s-m)). j is 1-based.
double swsscs_entry_variance(double lambda, int n, int j);

/// (4^n lambda^2n L_{lambda,n}(j), 4^n lambda^2n U_{lambda,n}(j)) with
/// L, U the sums of 1 / (4^k lambda^2k sqrt(pi (n-k+1/3))) and
/// 1 / (4^k lambda^2k sqrt(pi (n-k+1/4))) over k = j..n.
/// The lower value bounds swsscs_entry_variance; the upper one drops the
/// lambda^-2m weights and undershoots it.
std::pair<double, double> stirling_bounds(double lambda, int n, int j);

/// E<y_{n-1}, y_n> for a Jordan block (any n >= 2):
/// sum_{i=1}^{N-1} sum_{k=1}^{i-1} k lambda^(2k-1).
double swsscs_adjacent_mean(double lambda, int N);

/// Asymptotic growth of swsscs_adjacent_mean per unit N:
/// lambda / (1 - lambda^2)^2.
double swsscs_adjacent_slope(double lambda);

/// ln(4 lambda^2): positive exactly when lambda > 1/2.
double alpha_lambda(double lambda);

/// n (N - sum_{i=0}^{N-1} lambda^(2i)) / (1 - lambda^2), the typical size of
/// sigma_1^2(E X-^T) for a diagonal system.
double hermitian_martingale_scale(double lambda, int n, int N);

struct OracleRow {
  std::string name;
  double lambda = 0.0;
  double rho = 0.0;
  int n = 0;
  int N = 0;
  double value = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// Every oracle evaluated at one parameter point; bounds are NaN where an
/// oracle has none.
std::vector<OracleRow> oracle_table(const MomentOracle& point);

}  // namespace ldslab
