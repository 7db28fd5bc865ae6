#include "ldslab/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ldslab/errors.hpp"
#include "ldslab/io.hpp"
#include "ldslab/model.hpp"
#include "ldslab/moments.hpp"
#include "ldslab/montecarlo.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/rng.hpp"
#include "ldslab/spectra.hpp"
#include "ldslab/talagrand.hpp"

namespace ldslab {

void SuiteResult::expect(bool ok, const std::string& what) {
  ++checks;
  if (!ok && std::find(failures.begin(), failures.end(), what) == failures.end()) {
    failures.push_back(what);
  }
}

void SuiteResult::track_max(const std::string& key, double value) {
  auto [it, fresh] = metrics.emplace(key, value);
  if (!fresh && !(it->second >= value)) it->second = value;
}

void SuiteResult::track_min(const std::string& key, double value) {
  auto [it, fresh] = metrics.emplace(key, value);
  if (!fresh && !(it->second <= value)) it->second = value;
}

bool VerifyReport::ok() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.passed(); });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& s : suites) {
    for (const auto& f : s.failures) out.push_back(s.name + ": " + f);
  }
  return out;
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["ok"] = ok();
  doc["suite_count"] = suites.size();
  auto& arr = doc["suites"] = nlohmann::ordered_json::array();
  for (const auto& s : suites) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["passed"] = s.passed();
    j["checks"] = s.checks;
    j["failures"] = s.failures;
    auto& m = j["metrics"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.metrics) m[k] = format_double(v);
    auto& d = j["diagnostics"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.diagnostics) d[k] = format_double(v);
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

namespace {

double unit(PhiloxEngine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

int pick(PhiloxEngine& e, int lo, int hi) {
  return lo + static_cast<int>(unit(e) * (hi - lo + 1));
}

constexpr int kInstances = 1000;

}  // namespace

MatrixXd random_instance(std::uint64_t seed, std::uint64_t k) {
  PhiloxEngine e(seed, k);
  const int n = pick(e, 2, 10);
  const int N = pick(e, n + 1, 100);
  const int kind = pick(e, 0, 2);
  if (kind == 0) {
    MatrixXd g = gaussian_noise(n, N, seed ^ 0x9a55ULL, k);
    for (int j = 0; j < n; ++j) g.row(j) *= std::pow(10.0, 4.0 * unit(e) - 2.0);
    return g;
  }
  if (kind == 1) {
    std::vector<double> eigs(n);
    for (auto& x : eigs) x = 1.9 * unit(e) - 0.95;
    return simulate(make_spec(HermitianDiagonal{eigs}), N + 1, seed, k).x_minus();
  }
  const double lambda = 0.3 + 0.65 * unit(e);
  return simulate(make_spec(JordanBlock{lambda, n}), N + 1, seed, k).x_minus();
}

MatrixXd random_orthogonal(int n, std::uint64_t seed, std::uint64_t k) {
  const MatrixXd g = gaussian_noise(n, n, seed ^ 0x0b7ULL, k);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

namespace {

using SuiteFn = std::function<void(SuiteResult&, const VerifyOptions&)>;

std::vector<MatrixXd> instances(const VerifyOptions& o, int count) {
  std::vector<MatrixXd> out(count);
  parallel_for(out.size(), o.workers,
               [&](std::size_t k) { out[k] = random_instance(o.seed, k); });
  return out;
}

// Bundles mixing both families at moderate conditioning.
DataBundle ols_instance(std::uint64_t seed, std::uint64_t k) {
  PhiloxEngine e(seed ^ 0x0157ULL, k);
  const int N = pick(e, 50, 400);
  if (k % 2 == 0) {
    const int n = pick(e, 2, 8);
    std::vector<double> eigs(n);
    for (auto& x : eigs) x = 1.8 * unit(e) - 0.9;
    return simulate(make_spec(HermitianDiagonal{eigs}), N, seed, k);
  }
  const int n = pick(e, 2, 6);
  return simulate(make_spec(JordanBlock{0.3 + 0.6 * unit(e), n}), N, seed, k);
}

std::vector<DataBundle> ols_instances(const VerifyOptions& o, int count) {
  std::vector<std::optional<DataBundle>> tmp(count);
  parallel_for(tmp.size(), o.workers,
               [&](std::size_t k) { tmp[k].emplace(ols_instance(o.seed, k)); });
  std::vector<DataBundle> out;
  for (auto& b : tmp) out.push_back(std::move(*b));
  return out;
}

std::vector<SystemSpec> sample_specs() {
  MatrixXd dense(3, 3);
  dense << 0.5, 0.2, 0.0, -0.1, 0.4, 0.3, 0.05, 0.0, 0.6;
  return {make_spec(HermitianDiagonal{{0.5, -0.3, 0.9}}),
          make_spec(JordanBlock{0.6, 5}),
          make_spec(JordanBlock{0.95, 8}),
          make_spec(BlockDiagonal{{{0.5, 2}, {0.8, 3}, {0.4, 1}}}),
          make_spec(Dense{dense})};
}

void suite_bundle(SuiteResult& r, const VerifyOptions& o) {
  if (o.bundle) {
    try {
      const auto b = load_bundle(*o.bundle);
      const auto c = check_bundle(b);
      r.track_max("external_transition_residual", c.transition_residual);
      r.expect(c.ok(), "bundle invariant violated (" + c.violation() + ")");
    } catch (const LabError& e) {
      r.expect(false, std::string("bundle load failed (") + e.what() + ")");
    }
    return;
  }
  const auto specs = sample_specs();
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::uint64_t t = 0; t < 4; ++t) {
      const auto b = simulate(specs[s], 200, o.seed, t);
      const auto c = check_bundle(b);
      r.track_max("transition_residual", c.transition_residual);
      r.track_max("unrolled_residual", c.unrolled_residual);
      r.expect(c.ok(), "simulated bundle invariant (" + c.violation() + ")");
      const auto again = simulate(specs[s], 200, o.seed, t);
      r.expect(again.x_minus() == b.x_minus() && again.noise() == b.noise(),
               "simulate is deterministic");
    }
  }
  // Block independence: zeroing the noise of one block zeroes exactly its rows.
  const auto spec = specs[3];
  const auto base = simulate(spec, 100, o.seed);
  int offset = 0;
  for (const auto& blk : std::get<BlockDiagonal>(spec.description()).blocks) {
    MatrixXd e = base.noise();
    e.middleRows(offset, blk.size).setZero();
    const auto b = simulate_with_noise(spec, e);
    bool ok = b.x_minus().middleRows(offset, blk.size).isZero(0.0);
    for (int j = 0; j < spec.dim(); ++j) {
      if (j >= offset && j < offset + blk.size) continue;
      ok = ok && b.x_minus().row(j) == base.x_minus().row(j);
    }
    r.expect(ok, "block independence");
    offset += blk.size;
  }
  // The checker must notice a corrupted bundle.
  const auto good = simulate(specs[1], 50, o.seed);
  MatrixXd xp = good.x_plus();
  xp(2, 10) += 1e-3;
  const DataBundle bad(good.spec(), good.x_minus(), xp, good.noise(), good.seed());
  r.expect(!check_bundle(bad).ok(), "corruption detected");
}

void suite_closed_form(SuiteResult& r, const VerifyOptions& o) {
  for (double lambda : {0.3, 0.6, 0.95}) {
    for (int n : {1, 3, 8}) {
      const auto spec = make_spec(JordanBlock{lambda, n});
      const auto b = simulate(spec, 64, o.seed, static_cast<std::uint64_t>(n));
      for (int row = 1; row <= n; ++row) {
        for (int col = 0; col <= 64; ++col) {
          const double direct = col < 64 ? b.x_minus()(row - 1, col)
                                         : b.x_plus()(row - 1, 63);
          const double closed = closed_form_entry(*spec.jordan(), row, col, b.noise());
          const double rel = std::abs(closed - direct) / std::max(1.0, std::abs(direct));
          r.track_max("max_relative_mismatch", rel);
          r.expect(rel <= 1e-10, "closed form matches simulate");
        }
      }
    }
  }
}

void suite_lyapunov(SuiteResult& r, const VerifyOptions& o) {
  for (const auto& spec : sample_specs()) {
    const MatrixXd p = solve_lyapunov(spec);
    const double rel = lyapunov_residual(spec.matrix(), p) / std::max(1.0, p.cwiseAbs().maxCoeff());
    r.track_max("max_relative_residual", rel);
    r.expect(rel <= 1e-10, "Lyapunov residual");
  }
  const auto jordan = make_spec(JordanBlock{0.6, 5});
  const MatrixXd direct = solve_lyapunov(jordan);
  const MatrixXd iter = solve_lyapunov_iterative(jordan.matrix());
  const double gap = (direct - iter).norm() / direct.norm();
  r.track_max("direct_vs_iterative", gap);
  r.expect(gap <= 1e-9, "direct and iterative solutions agree");

  const auto scalar = make_spec(HermitianDiagonal{{0.9}});
  const TrialPlan plan{scalar, 200, 2000, o.seed + 11, "last_state_sq"};
  const auto est = run_trials(plan, StatisticRegistry::builtin(), o.workers);
  const double target = stationary_covariance(scalar)(0, 0);
  const auto verdict = compare_to_oracle(est, target);
  r.metrics["stationary_z"] = verdict.z_score;
  r.expect(verdict.pass, "empirical stationary variance");
}

void suite_projectors(SuiteResult& r, const VerifyOptions&) {
  for (const auto& spec : sample_specs()) {
    if (std::holds_alternative<Dense>(spec.description())) {
      bool threw = false;
      try {
        projector_decomposition(spec);
      } catch (const UnsupportedSpec&) {
        threw = true;
      }
      r.expect(threw, "dense spec rejected");
      continue;
    }
    const auto set = projector_decomposition(spec);
    const double worst = std::max({set.partition_residual(), set.orthogonality_residual(),
                                   set.idempotence_residual()});
    r.track_max("max_residual", worst);
    r.expect(worst <= 1e-14, "projector identities");
  }
}

void suite_neg2mom(SuiteResult& r, const VerifyOptions& o) {
  const auto xs = instances(o, kInstances);
  for (const auto& x : xs) {
    const auto rep = spectrum(x);
    r.expect(!rep.degenerate, "instance has full row rank");
    if (rep.degenerate) continue;
    const double lhs = rep.inverse_singular_moment();
    const double rhs = rep.inverse_distance_moment();
    const double rel = std::abs(lhs - rhs) / lhs;
    r.track_max("max_relative_gap", rel);
    r.expect(rel <= 1e-8, "sum sigma^-2 = sum d^-2");
  }
}

void suite_projection_bound(SuiteResult& r, const VerifyOptions& o) {
  const auto xs = instances(o, 200);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto& x = xs[k];
    const auto rows = row_distances(x);
    if (rows.degenerate) continue;
    const MatrixXd v = gaussian_noise(static_cast<int>(x.rows()),
                                      static_cast<int>(x.cols()), o.seed ^ 0x7770ULL, k);
    for (Index j = 0; j < x.rows(); ++j) {
      VectorXd u = project_off_hyperplane(x, j, v.row(j).transpose());
      u /= u.norm();
      const double inner = std::abs(x.row(j).dot(u));
      const double slack = inner - rows.distances(j);
      r.track_max("max_excess_over_distance", slack / (1.0 + x.row(j).norm()));
      r.expect(slack <= 1e-10 * (1.0 + x.row(j).norm()), "|<y_j, x_j>| <= d_j");
    }
  }
}

void suite_precision(SuiteResult& r, const VerifyOptions& o) {
  const auto xs = instances(o, kInstances);
  for (const auto& x : xs) {
    const auto rep = precision_constraints(x);
    r.track_max("max_residual_over_tolerance", rep.max_residual() / rep.tolerance);
    r.track_max("max_off_diagonal_sum", rep.off_diagonal_sum.maxCoeff());
    r.expect(rep.within_tolerance(), "precision constraints within tolerance");
    r.expect(rep.sign_property(), "off-diagonal sum is non-positive");
  }
  for (std::size_t k = 0; k < 50; ++k) {
    const MatrixXd y = gaussian_noise(2, 30, o.seed ^ 0x22ULL, k);
    const double a = y.row(0).squaredNorm(), b = y.row(1).squaredNorm();
    const double c = y.row(0).dot(y.row(1));
    const auto v = solve_precision_2d(a, b, c);
    double worst = 0.0;
    for (double res : v.residuals(a, b, c)) worst = std::max(worst, std::abs(res));
    r.track_max("max_2x2_residual", worst);
    r.expect(worst <= 1e-12, "2x2 precision equations");
  }
}

void suite_gershgorin(SuiteResult& r, const VerifyOptions& o) {
  const auto xs = instances(o, kInstances);
  for (const auto& x : xs) {
    const auto g = gershgorin(sample_covariance(x));
    r.expect(g.contains_all, "eigenvalues inside the disc union");
  }
}

void suite_interlacing(SuiteResult& r, const VerifyOptions& o) {
  const auto xs = instances(o, kInstances);
  for (const auto& x : xs) {
    const auto cov = sample_covariance(x);
    for (Index k = 1; k < x.rows(); ++k) {
      const auto rep = interlacing_check(cov, k);
      r.track_min("min_relative_margin", rep.min_margin / rep.full(0));
      r.expect(rep.holds, "Cauchy interlacing");
    }
    const VectorXd ev = descending_eigenvalues(cov.sigma);
    const double last_row = x.row(x.rows() - 1).squaredNorm();
    r.expect(ev(ev.size() - 1) <= last_row * (1.0 + 1e-12) + 1e-300,
             "lambda_n <= |y_n|^2");
  }
}

void suite_svd(SuiteResult& r, const VerifyOptions& o) {
  const auto xs = instances(o, 300);
  for (const auto& x : xs) {
    const auto f = svd_factorization(x);
    r.track_max("max_reconstruction", f.reconstruction_residual);
    r.expect(f.reconstruction_residual <= 1e-12, "X = U S V^T");
    const double max_row = x.rowwise().norm().maxCoeff();
    r.expect(f.singular_values(0) >= max_row * (1.0 - 1e-12),
             "sigma_1 >= max_j |y_j|");
  }
}

void suite_ols_identity(SuiteResult& r, const VerifyOptions& o) {
  const auto bundles = ols_instances(o, 500);
  for (const auto& b : bundles) {
    const auto fit = ols_fit(b);
    r.expect(fit.full_rank, "full rank");
    r.track_max("max_relative_residual",
                fit.identity_residual / (1.0 + fit.error_frobenius));
    r.expect(fit.identity_holds(1e-8), "|A - A_hat|_F = |E X^+|_F");
  }
}

void suite_sandwich(SuiteResult& r, const VerifyOptions& o) {
  const auto bundles = ols_instances(o, 500);
  int combined_violations = 0;
  for (const auto& b : bundles) {
    const auto rep = spectrum(b.x_minus());
    if (rep.degenerate) continue;
    const auto fit = ols_fit(b);
    const auto bounds = error_bounds(b, rep);
    r.expect(bounds.deterministic_hold(fit.error_frobenius), "deterministic sandwich");
    r.track_min("min_upper_svd_over_error", bounds.upper_svd / fit.error_frobenius);
    r.track_min("min_error_over_lower_svd", fit.error_frobenius / bounds.lower_svd);
    r.track_min("min_frob_upper_over_error", bounds.sandwich_frob_upper / fit.error_frobenius);
    r.track_min("min_error_over_frob_lower", fit.error_frobenius / bounds.sandwich_frob_lower);
    combined_violations += fit.error_frobenius > bounds.combined_upper;
  }
  r.diagnostics["combined_upper_violations"] = combined_violations;
  for (double lambda : {0.55, 0.75, 0.92, 0.95}) {
    for (int n : {2, 5, 10, 15}) {
      for (int N : {100, 1000, 8000}) {
        const auto [lo, hi] = sandwich_bound_swsscs(n, N, lambda);
        r.expect(lo <= hi, "explicit sandwich ordered");
      }
    }
  }
}

void suite_unitary(SuiteResult& r, const VerifyOptions& o) {
  const auto bundles = ols_instances(o, 100);
  for (std::size_t k = 0; k < bundles.size(); ++k) {
    const auto& b = bundles[k];
    const MatrixXd u = random_orthogonal(b.dim(), o.seed, k);
    const double gap = unitary_invariance_check(b, u);
    const double rel = gap / (1.0 + ols_fit(b).error_frobenius);
    r.track_max("max_relative_gap", rel);
    r.expect(rel <= 1e-8, "error invariant under orthogonal change of basis");
  }
}

void suite_argmin(SuiteResult& r, const VerifyOptions& o) {
  const auto bundles = ols_instances(o, 20);
  for (std::size_t k = 0; k < bundles.size(); ++k) {
    const auto& b = bundles[k];
    const MatrixXd a_hat = ols_fit(b).a_hat;
    const double base = squared_residual(b, a_hat);
    for (int d = 0; d < 20; ++d) {
      MatrixXd dir = gaussian_noise(b.dim(), b.dim(), o.seed ^ 0xa59ULL, k * 20 + d);
      dir /= dir.norm();
      const double moved = squared_residual(b, a_hat + 0.01 * dir);
      r.track_min("min_relative_increase", (moved - base) / base);
      r.expect(moved >= base * (1.0 - 1e-12), "A_hat minimizes the squared residual");
    }
  }
}

void suite_moments(SuiteResult& r, const VerifyOptions& o) {
  StatisticRegistry reg = StatisticRegistry::builtin();
  reg.add("gram_11_sq", [](const DataBundle& b) {
    const double g = b.x_minus().row(0).squaredNorm();
    return g * g;
  });
  reg.add("gram_12_sq", [](const DataBundle& b) {
    const double g = b.x_minus().row(0).dot(b.x_minus().row(1));
    return g * g;
  });
  reg.add("anti_diagonal_entry_sq", [](const DataBundle& b) {
    // x_{n-j+1}[j] at j = 1: column n - 1 of X+.
    const double v = b.x_plus()(0, b.dim() - 1);
    return v * v;
  });
  auto gate = [&](const std::string& label, const SystemSpec& spec, int N,
                  const std::string& stat, double oracle, std::uint64_t salt) {
    const TrialPlan plan{spec, N, 400, o.seed * 1000 + salt, stat};
    const auto est = run_trials(plan, reg, o.workers);
    const auto v = compare_to_oracle(est, oracle);
    r.metrics["z_" + label] = v.z_score;
    r.expect(v.pass, "oracle gate " + label);
  };
  std::uint64_t salt = 0;
  for (auto [lambda, N] : {std::pair{0.5, 500}, std::pair{0.9, 2000}}) {
    const auto spec = make_spec(HermitianDiagonal{{lambda}});
    const std::string tag = format_double(lambda) + "_" + std::to_string(N);
    gate("row_mean_" + tag, spec, N, "gram_11", hermitian_row_mean(lambda, N), ++salt);
    gate("diag_second_" + tag, spec, N, "gram_11_sq",
         hermitian_diagonal_moments(lambda, N).second_moment, ++salt);
  }
  {
    const auto spec = make_spec(HermitianDiagonal{{0.8, 0.6}});
    gate("cross_mean", spec, 500, "gram_12", 0.0, ++salt);
    gate("cross_second", spec, 500, "gram_12_sq",
         hermitian_cross_second_moment(0.8, 0.6, 500).second_moment, ++salt);
  }
  for (auto [lambda, N] : {std::pair{0.5, 500}, std::pair{0.9, 2000}}) {
    gate("adjacent_mean_" + format_double(lambda) + "_" + std::to_string(N),
         make_spec(JordanBlock{lambda, 3}), N, "adjacent_gram",
         swsscs_adjacent_mean(lambda, N), ++salt);
  }
  for (int n : {2, 4, 6}) {
    gate("entry_variance_n" + std::to_string(n), make_spec(JordanBlock{0.6, n}), 50,
         "anti_diagonal_entry_sq", swsscs_entry_variance(0.6, n, 1), ++salt);
  }

  int upper_violations = 0;
  for (double lambda : {0.55, 0.75, 0.95}) {
    for (int n = 2; n <= 20; ++n) {
      const double exact = swsscs_entry_variance(lambda, n, 1);
      const auto [lo, hi] = stirling_bounds(lambda, n, 1);
      r.expect(lo <= exact, "Stirling lower bound");
      upper_violations += exact > hi;
      for (int j = 2; j <= n; ++j) {
        r.expect(swsscs_entry_variance(lambda, n, j) <=
                     swsscs_entry_variance(lambda, n, j - 1),
                 "entry variance non-increasing in j");
      }
    }
  }
  r.diagnostics["stirling_upper_violations_of_57"] = upper_violations;
}

void suite_frobenius(SuiteResult& r, const VerifyOptions& o) {
  const std::vector<std::tuple<double, int, int>> cases{
      {0.6, 4, 30}, {0.3, 1, 40}, {0.95, 6, 40}, {0.8, 2, 3}, {0.5, 5, 25}};
  for (const auto& [lambda, n, N] : cases) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto b = simulate(make_spec(JordanBlock{lambda, n}), N, o.seed + s);
      const double direct = b.x_minus().squaredNorm();
      const double closed = frobenius_closed_form(lambda, n, b.noise());
      const double rel = std::abs(closed - direct) / direct;
      r.track_max("max_relative_mismatch", rel);
      r.expect(rel <= 1e-8, "closed-form Frobenius norm");
    }
  }
  bool threw = false;
  try {
    frobenius_closed_form(0.5, 10, MatrixXd::Zero(10, 100));
  } catch (const TooLarge&) {
    threw = true;
  }
  r.expect(threw, "size cap enforced");
}

void suite_talagrand(SuiteResult& r, const VerifyOptions& o) {
  const std::vector<SystemSpec> specs{make_spec(HermitianDiagonal{{0.9, 0.5, -0.3}}),
                                      make_spec(JordanBlock{0.95, 10}),
                                      make_spec(BlockDiagonal{{{0.7, 3}, {0.4, 2}}})};
  for (const auto& spec : specs) {
    const double op = noise_map_norm(spec, 300);
    for (std::uint64_t t = 0; t < 30; ++t) {
      const auto b = simulate(spec, 300, o.seed, t);
      const auto s = talagrand_ratio(b);
      r.expect(s.ratio <= talagrand_deterministic_bound(b) * (1.0 + 1e-12),
               "ratio <= sigma_1(X) / sigma_n(E)");
      r.expect(s.ratio <= op * (1.0 + 1e-8), "ratio <= operator norm");
    }
  }
  const double rho = 0.9;
  const auto herm = make_spec(HermitianDiagonal{{rho}});
  const TrialPlan plan{herm, 5000, 200, o.seed + 77, "talagrand_ratio"};
  const auto samples = run_samples(plan, StatisticRegistry::builtin(), o.workers);
  const auto est = summarize(samples, plan.base_seed);
  r.metrics["hermitian_q99"] = est.quantiles[5];
  r.expect(est.quantiles[5] <= 1.1 / (1.0 - rho), "Hermitian q99 cap");

  const auto zero = simulate_with_noise(herm, MatrixXd::Zero(1, 10));
  r.expect(talagrand_ratio(zero).zero_noise, "zero noise flagged");
}

void suite_martingale(SuiteResult& r, const VerifyOptions& o) {
  const auto bundles = ols_instances(o, 200);
  for (const auto& b : bundles) {
    const auto m = martingale_stats(b.noise(), b.x_minus());
    r.expect(m.within_bound, "sigma_1(E X^T) <= sigma_1(E) sigma_1(X)");
  }
  const auto spec = make_spec(HermitianDiagonal{std::vector<double>(5, 0.9)});
  const TrialPlan plan{spec, 2000, 50, o.seed + 99, "martingale_sigma1_sq"};
  const auto est = run_trials(plan, StatisticRegistry::builtin(), o.workers);
  r.diagnostics["sigma1_sq_over_scale"] = est.mean / hermitian_martingale_scale(0.9, 5, 2000);
}

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites{
      {"bundle", suite_bundle},
      {"closed-form", suite_closed_form},
      {"lyapunov", suite_lyapunov},
      {"projectors", suite_projectors},
      {"neg2mom", suite_neg2mom},
      {"projection-bound", suite_projection_bound},
      {"precision", suite_precision},
      {"gershgorin", suite_gershgorin},
      {"interlacing", suite_interlacing},
      {"svd", suite_svd},
      {"ols-identity", suite_ols_identity},
      {"sandwich", suite_sandwich},
      {"unitary", suite_unitary},
      {"argmin", suite_argmin},
      {"moments", suite_moments},
      {"frobenius", suite_frobenius},
      {"talagrand-bound", suite_talagrand},
      {"martingale", suite_martingale},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

VerifyReport run_verify(const VerifyOptions& options) {
  for (const auto& s : options.suites) {
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
      throw BadParameter("unknown suite '" + s + "'");
    }
  }
  std::vector<std::string> wanted = options.suites;
  if (options.bundle && wanted.empty()) wanted = {"bundle"};
  VerifyReport report;
  for (const auto& [name, fn] : registry()) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), name) == wanted.end()) {
      continue;
    }
    SuiteResult result;
    result.name = name;
    try {
      fn(result, options);
    } catch (const std::exception& e) {
      result.expect(false, std::string("suite aborted: ") + e.what());
    }
    report.suites.push_back(std::move(result));
  }
  return report;
}

}  // namespace ldslab
