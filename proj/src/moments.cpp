#include "ldslab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "ldslab/errors.hpp"

namespace ldslab {

namespace {

void require_stable(double lambda, const char* what) {
  if (!(std::abs(lambda) < 1.0)) {
    throw BadParameter(std::string(what) + " must satisfy |value| < 1");
  }
}

void require_unit_interval(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw BadParameter("lambda must lie in (0, 1)");
  }
}

void require_length(int N, int minimum) {
  if (N < minimum) {
    throw BadParameter("N must be at least " + std::to_string(minimum));
  }
}

// v(i) = sum_{s=0}^{i-1} lambda^(2s), the variance of x_i, for i = 1..N-1.
std::vector<double> state_variances(double lambda, int N) {
  std::vector<double> v(N, 0.0);
  const double l2 = lambda * lambda;
  for (int i = 1; i < N; ++i) v[i] = l2 * v[i - 1] + 1.0;
  return v;
}

// tail[i] = sum_{d=1}^{N-1-i} q^d.
std::vector<double> geometric_tails(double q, int N) {
  std::vector<double> tail(N, 0.0);
  for (int i = N - 2; i >= 1; --i) tail[i] = q * (1.0 + tail[i + 1]);
  return tail;
}

double sum_largest_first(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(), std::greater<>());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

double log_binomial(int k, int m) {
  return std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0);
}

}  // namespace

double MomentOracle::c2() const { return 1.0 / (1.0 - lambda * lambda); }
double MomentOracle::c4() const {
  return 1.0 / (1.0 - lambda * lambda * lambda * lambda);
}

double hermitian_row_mean(double lambda, int N) {
  require_stable(lambda, "lambda");
  require_length(N, 2);
  const auto v = state_variances(lambda, N);
  double acc = 0.0;
  for (int i = 1; i < N; ++i) acc += v[i];
  return acc;
}

CrossMoment hermitian_cross_second_moment(double lambda, double rho, int N) {
  require_stable(lambda, "lambda");
  require_stable(rho, "rho");
  require_length(N, 2);
  const auto va = state_variances(lambda, N);
  const auto vb = state_variances(rho, N);
  const auto tail = geometric_tails(lambda * rho, N);
  double acc = 0.0;
  for (int i = 1; i < N; ++i) acc += va[i] * vb[i] * (1.0 + 2.0 * tail[i]);
  return {0.0, acc};
}

DiagonalMoment hermitian_diagonal_moments(double lambda, int N) {
  require_stable(lambda, "lambda");
  require_length(N, 2);
  const auto v = state_variances(lambda, N);
  const auto tail = geometric_tails(lambda * lambda, N);
  DiagonalMoment out;
  double frob = 0.0;
  for (int i = 1; i < N; ++i) {
    out.mean += v[i];
    frob += v[i] * v[i] * (1.0 + 2.0 * tail[i]);
  }
  out.variance = 2.0 * frob;
  out.second_moment = out.mean * out.mean + out.variance;
  return out;
}

double swsscs_entry_variance(double lambda, int n, int j) {
  require_unit_interval(lambda);
  if (n < 1 || j < 1 || j > n) {
    throw BadParameter("row index must satisfy 1 <= j <= n");
  }
  const double log_l2 = 2.0 * std::log(lambda);
  std::vector<double> terms;
  for (int s = 0; s <= n - j; ++s) {
    for (int m = 0; m <= s; ++m) {
      terms.push_back(std::exp(2.0 * log_binomial(s, m) + (s - m) * log_l2));
    }
  }
  return sum_largest_first(std::move(terms));
}

std::pair<double, double> stirling_bounds(double lambda, int n, int j) {
  require_unit_interval(lambda);
  if (n < 1 || j < 1 || j > n) {
    throw BadParameter("row index must satisfy 1 <= j <= n");
  }
  const double q = 4.0 * lambda * lambda;
  double lower = 0.0;
  double upper = 0.0;
  for (int k = j; k <= n; ++k) {
    const int s = n - k;
    const double qs = std::pow(q, s);
    lower += qs / std::sqrt(std::numbers::pi * (s + 1.0 / 3.0));
    upper += qs / std::sqrt(std::numbers::pi * (s + 0.25));
  }
  return {lower, upper};
}

double swsscs_adjacent_mean(double lambda, int N) {
  require_unit_interval(lambda);
  require_length(N, 3);
  // g accumulates sum_{k=1}^{i-1} k lambda^(2k-1) as i advances.
  double g = 0.0;
  double acc = 0.0;
  double lam_pow = 1.0 / lambda;  // lambda^(2k-1) at k = 0
  const double l2 = lambda * lambda;
  for (int i = 1; i < N; ++i) {
    const int k = i - 1;
    if (k >= 1) g += k * lam_pow;
    acc += g;
    lam_pow *= l2;
  }
  return acc;
}

double swsscs_adjacent_slope(double lambda) {
  require_unit_interval(lambda);
  const double c = 1.0 - lambda * lambda;
  return lambda / (c * c);
}

double alpha_lambda(double lambda) { return std::log(4.0 * lambda * lambda); }

double hermitian_martingale_scale(double lambda, int n, int N) {
  require_stable(lambda, "lambda");
  require_length(N, 1);
  double geometric = 0.0;
  double p = 1.0;
  for (int i = 0; i < N; ++i) {
    geometric += p;
    p *= lambda * lambda;
  }
  return n * (N - geometric) / (1.0 - lambda * lambda);
}

std::vector<OracleRow> oracle_table(const MomentOracle& point) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto row = [&](std::string name, double value, double lo = 0.0,
                       double hi = 0.0, bool bounded = false) {
    return OracleRow{std::move(name), point.lambda, point.rho, point.n,
                     point.N,         value,        bounded ? lo : nan,
                     bounded ? hi : nan};
  };
  std::vector<OracleRow> out;
  out.push_back(row("hermitian_row_mean", hermitian_row_mean(point.lambda, point.N)));
  out.push_back(row("hermitian_cross_second_moment",
                    hermitian_cross_second_moment(point.lambda, point.rho, point.N)
                        .second_moment));
  const auto diag = hermitian_diagonal_moments(point.lambda, point.N);
  out.push_back(row("hermitian_diagonal_second_moment", diag.second_moment));
  out.push_back(row("hermitian_diagonal_variance", diag.variance));
  out.push_back(row("hermitian_martingale_scale",
                    hermitian_martingale_scale(point.lambda, point.n, point.N)));
  if (point.lambda > 0.0 && point.lambda < 1.0) {
    const auto [lo, hi] = stirling_bounds(point.lambda, point.n, 1);
    out.push_back(row("swsscs_entry_variance",
                      swsscs_entry_variance(point.lambda, point.n, 1), lo, hi,
                      true));
    if (point.N >= 3) {
      out.push_back(
          row("swsscs_adjacent_mean", swsscs_adjacent_mean(point.lambda, point.N)));
    }
    out.push_back(row("alpha_lambda", alpha_lambda(point.lambda)));
  }
  return out;
}

}  // namespace ldslab
