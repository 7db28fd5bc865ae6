#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldslab/model.hpp"

namespace ldslab {

struct TalagrandSample {
  double ratio = 0.0;   // |X-|_F / |E|_F
  double frob_x = 0.0;
  double frob_e = 0.0;
  int n = 0;
  int N = 0;
  double lambda = 0.0;  // spectral radius of A
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  bool zero_noise = false;  // E = 0; ratio is reported as 0
};

TalagrandSample talagrand_ratio(const DataBundle& bundle);

/// sigma_1(X-) / sigma_n(E), an upper bound for the ratio on every instance.
double talagrand_deterministic_bound(const DataBundle& bundle);

/// Largest N*n accepted by frobenius_closed_form.
inline constexpr int kFrobeniusCap = 400;

/// |X-|_F^2 for a Jordan block from the explicit binomial expansion over
/// rows j, times i and noise indices s, t. X- holds x_0..x_{N-1}, so only
/// w_0..w_{N-2} contribute. Throws TooLarge when N*n exceeds `cap`.
double frobenius_closed_form(double lambda, int n, const MatrixXd& noise,
                             int cap = kFrobeniusCap);

/// Operator norm of the linear map (w_0..w_{N-1}) -> X-, by power iteration
/// on the map and its adjoint.
double noise_map_norm(const SystemSpec& spec, int N, int iterations = 500,
                      double tol = 1e-10);

enum class Family { Jordan, Hermitian };

Family parse_family(const std::string& name);
std::string to_string(Family family);

/// Jordan: J_n(lambda). Hermitian: diag(lambda, ..., lambda).
SystemSpec family_spec(Family family, double lambda, int n);

struct ScalingPoint {
  int n = 0;
  double median_ratio = 0.0;
  double q99 = 0.0;
  double log_median = 0.0;
  std::vector<double> ratios;  // in trial order
};

struct ScalingStudy {
  Family family = Family::Jordan;
  double lambda = 0.0;
  int N = 0;
  std::vector<ScalingPoint> points;
  double slope = 0.0;     // least squares of log median against n
  double ci_low = 0.0;    // 95% percentile bootstrap
  double ci_high = 0.0;
  int bootstrap_reps = 0;

  bool ci_excludes_zero() const { return ci_low > 0.0 || ci_high < 0.0; }
};

/// Seed of trial t at dimension n: simulate(spec, N, seed, (n << 32) | t).
std::uint64_t scaling_trial_index(int n, int t);

/// Throws InsufficientPoints for fewer than two distinct n, BadParameter
/// if n_list is not strictly ascending.
ScalingStudy scaling_study(Family family, double lambda,
                           const std::vector<int>& n_list, int N, int trials,
                           std::uint64_t seed, int workers = 1,
                           int bootstrap_reps = 1000);

/// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ldslab
