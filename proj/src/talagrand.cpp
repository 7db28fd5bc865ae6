#include "ldslab/talagrand.hpp"

#include <algorithm>
#include <cmath>

#include "ldslab/errors.hpp"
#include "ldslab/montecarlo.hpp"
#include "ldslab/rng.hpp"
#include "ldslab/spectra.hpp"

namespace ldslab {

TalagrandSample talagrand_ratio(const DataBundle& bundle) {
  TalagrandSample s;
  s.frob_x = bundle.x_minus().norm();
  s.frob_e = bundle.noise().norm();
  s.n = bundle.dim();
  s.N = bundle.length();
  s.lambda = bundle.spec().spectral_radius();
  s.seed = bundle.seed();
  s.trial = bundle.trial();
  s.zero_noise = !(s.frob_e > 0.0);
  s.ratio = s.zero_noise ? 0.0 : s.frob_x / s.frob_e;
  return s;
}

double talagrand_deterministic_bound(const DataBundle& bundle) {
  const VectorXd sx = singular_values(bundle.x_minus());
  const VectorXd se = singular_values(bundle.noise());
  return sx(0) / se(se.size() - 1);
}

double frobenius_closed_form(double lambda, int n, const MatrixXd& noise,
                             int cap) {
  if (!(lambda > 0.0 && lambda < 1.0) || n < 1) {
    throw BadParameter("closed form needs lambda in (0, 1) and n >= 1");
  }
  if (noise.rows() != n) {
    throw BadParameter("noise must have n rows");
  }
  const int N = static_cast<int>(noise.cols());
  if (static_cast<long long>(N) * n > cap) {
    throw TooLarge("N*n = " + std::to_string(static_cast<long long>(N) * n) +
                   " exceeds the closed-form cap " + std::to_string(cap));
  }
  // coef[d][m] = C(d, m) lambda^(d - m)
  std::vector<std::vector<double>> coef(N);
  for (int d = 0; d < N; ++d) {
    coef[d].resize(std::min(d, n - 1) + 1);
    for (int m = 0; m < static_cast<int>(coef[d].size()); ++m) {
      coef[d][m] = binomial_power(d, m, lambda);
    }
  }
  double total = 0.0;
  for (int i = 1; i < N; ++i) {
    for (int j = 1; j <= n; ++j) {
      double row = 0.0;
      for (int s = 1; s <= i; ++s) {
        for (int t = 1; t <= i; ++t) {
          const int mt = std::min(i - t, n - j);
          const int ms = std::min(i - s, n - j);
          for (int m = 0; m <= mt; ++m) {
            const double a = coef[i - t][m] * noise(j + m - 1, t - 1);
            for (int mp = 0; mp <= ms; ++mp) {
              row += a * coef[i - s][mp] * noise(j + mp - 1, s - 1);
            }
          }
        }
      }
      total += row;
    }
  }
  return total;
}

namespace {

MatrixXd forward_map(const MatrixXd& a, const MatrixXd& w) {
  const Index N = w.cols();
  MatrixXd x = MatrixXd::Zero(w.rows(), N);
  for (Index i = 1; i < N; ++i) x.col(i) = a * x.col(i - 1) + w.col(i - 1);
  return x;
}

MatrixXd adjoint_map(const MatrixXd& a, const MatrixXd& y) {
  const Index N = y.cols();
  MatrixXd w = MatrixXd::Zero(y.rows(), N);
  VectorXd g = y.col(N - 1);
  for (Index i = N - 1; i >= 1; --i) {
    if (i < N - 1) g = y.col(i) + a.transpose() * g;
    w.col(i - 1) = g;
  }
  return w;
}

}  // namespace

double noise_map_norm(const SystemSpec& spec, int N, int iterations,
                      double tol) {
  if (N < 2) throw BadParameter("noise map needs N >= 2");
  const MatrixXd& a = spec.matrix();
  MatrixXd v = gaussian_noise(spec.dim(), N, 0x6e6f697365ULL);
  v /= v.norm();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const MatrixXd x = forward_map(a, v);
    const double next = x.norm();
    v = adjoint_map(a, x);
    const double vn = v.norm();
    if (!(vn > 0.0)) return 0.0;
    v /= vn;
    if (std::abs(next - sigma) <= tol * next) return next;
    sigma = next;
  }
  return sigma;
}

Family parse_family(const std::string& name) {
  if (name == "jordan" || name == "swsscs") return Family::Jordan;
  if (name == "hermitian" || name == "diagonal") return Family::Hermitian;
  throw BadParameter("unknown family '" + name + "' (jordan|hermitian)");
}

std::string to_string(Family family) {
  return family == Family::Jordan ? "jordan" : "hermitian";
}

SystemSpec family_spec(Family family, double lambda, int n) {
  if (family == Family::Jordan) return make_spec(JordanBlock{lambda, n});
  return make_spec(HermitianDiagonal{std::vector<double>(n, lambda)});
}

std::uint64_t scaling_trial_index(int n, int t) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(t);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

ScalingStudy scaling_study(Family family, double lambda,
                           const std::vector<int>& n_list, int N, int trials,
                           std::uint64_t seed, int workers,
                           int bootstrap_reps) {
  if (n_list.size() < 2) {
    throw InsufficientPoints("scaling study needs at least two values of n");
  }
  if (!std::is_sorted(n_list.begin(), n_list.end(), std::less_equal<>()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
    throw BadParameter("n_list must be strictly ascending");
  }
  if (trials < 2) throw BadParameter("scaling study needs at least 2 trials");

  ScalingStudy study;
  study.family = family;
  study.lambda = lambda;
  study.N = N;
  study.bootstrap_reps = bootstrap_reps;

  std::vector<SystemSpec> specs;
  for (int n : n_list) specs.push_back(family_spec(family, lambda, n));

  const std::size_t per = static_cast<std::size_t>(trials);
  std::vector<double> ratios(n_list.size() * per);
  parallel_for(ratios.size(), workers, [&](std::size_t k) {
    const std::size_t p = k / per;
    const int t = static_cast<int>(k % per);
    const auto bundle =
        simulate(specs[p], N, seed, scaling_trial_index(n_list[p], t));
    ratios[k] = talagrand_ratio(bundle).ratio;
  });

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t p = 0; p < n_list.size(); ++p) {
    ScalingPoint point;
    point.n = n_list[p];
    point.ratios.assign(ratios.begin() + p * per, ratios.begin() + (p + 1) * per);
    std::vector<double> sorted = point.ratios;
    std::sort(sorted.begin(), sorted.end());
    point.median_ratio = quantile(sorted, 0.5);
    point.q99 = quantile(sorted, 0.99);
    point.log_median = std::log(point.median_ratio);
    xs.push_back(point.n);
    ys.push_back(point.log_median);
    study.points.push_back(std::move(point));
  }
  study.slope = ols_slope(xs, ys);

  if (bootstrap_reps > 0) {
    PhiloxEngine engine(seed, 0x626f6f74ULL);
    std::vector<double> slopes(bootstrap_reps);
    std::vector<double> resample(per);
    std::vector<double> boot_y(n_list.size());
    for (int b = 0; b < bootstrap_reps; ++b) {
      for (std::size_t p = 0; p < n_list.size(); ++p) {
        const auto& src = study.points[p].ratios;
        for (auto& r : resample) {
          const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
          r = src[std::min(per - 1, static_cast<std::size_t>(u * per))];
        }
        std::sort(resample.begin(), resample.end());
        boot_y[p] = std::log(quantile(resample, 0.5));
      }
      slopes[b] = ols_slope(xs, boot_y);
    }
    std::sort(slopes.begin(), slopes.end());
    study.ci_low = quantile(slopes, 0.025);
    study.ci_high = quantile(slopes, 0.975);
  } else {
    study.ci_low = study.ci_high = study.slope;
  }
  return study;
}

}  // namespace ldslab
