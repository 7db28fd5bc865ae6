// Acceptance criteria, one PASS/FAIL line each. Tolerances and sample sizes
// are fixed here; nothing is read from the environment.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ldslab/experiments.hpp"
#include "ldslab/io.hpp"
#include "ldslab/moments.hpp"
#include "ldslab/montecarlo.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/rng.hpp"
#include "ldslab/spectra.hpp"
#include "ldslab/talagrand.hpp"
#include "ldslab/verify.hpp"

using namespace ldslab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20261019;

int workers() {
  return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
}

struct Outcome {
  bool pass = false;
  std::string metrics;
  double limit_seconds = 0.0;  // 0 means no runtime bound
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<MatrixXd> random_matrices(int count) {
  std::vector<MatrixXd> out(count);
  parallel_for(out.size(), workers(),
               [&](std::size_t k) { out[k] = random_instance(kSeed, k); });
  return out;
}

// Simulated bundles from both families, kept away from the roundoff regime.
std::vector<DataBundle> simulated_bundles(int count) {
  std::vector<std::optional<DataBundle>> tmp(count);
  parallel_for(tmp.size(), workers(), [&](std::size_t k) {
    PhiloxEngine e(kSeed, k);
    std::uniform_int_distribution<int> length(60, 1500);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int N = length(e);
    if (k % 2 == 0) {
      std::uniform_int_distribution<int> dim(2, 10);
      std::vector<double> eigs(dim(e));
      for (auto& x : eigs) x = 1.9 * unit(e) - 0.95;
      tmp[k].emplace(simulate(make_spec(HermitianDiagonal{eigs}), N, kSeed, k));
    } else {
      std::uniform_int_distribution<int> dim(2, 6);
      const int n = dim(e);
      tmp[k].emplace(simulate(make_spec(JordanBlock{0.1 + 0.8 * unit(e), n}), N, kSeed, k));
    }
  });
  std::vector<DataBundle> out;
  for (auto& b : tmp) out.push_back(std::move(*b));
  return out;
}

Outcome negative_second_moment() {
  const auto xs = random_matrices(1000);
  double worst = 0.0;
  int degenerate = 0;
  for (const auto& x : xs) {
    const auto r = spectrum(x);
    if (r.degenerate) {
      ++degenerate;
      continue;
    }
    const double lhs = r.inverse_singular_moment();
    worst = std::max(worst, std::abs(lhs - r.inverse_distance_moment()) / lhs);
  }
  return {worst <= 1e-8 && degenerate == 0,
          "instances=1000 max_rel_gap=" + fmt(worst) + " degenerate=" +
              std::to_string(degenerate),
          10.0};
}

Outcome precision_matrix() {
  const auto xs = random_matrices(1000);
  int bad_residual = 0, bad_sign = 0;
  double worst_ratio = 0.0, max_sign = -1e300;
  for (const auto& x : xs) {
    const auto p = precision_constraints(x);
    worst_ratio = std::max(worst_ratio, p.max_residual() / p.tolerance);
    max_sign = std::max(max_sign, p.off_diagonal_sum.maxCoeff());
    bad_residual += !p.within_tolerance();
    bad_sign += !p.sign_property(1e-10);
  }
  return {bad_residual == 0 && bad_sign == 0,
          "instances=1000 max_residual/tol=" + fmt(worst_ratio) +
              " max_offdiag_sum=" + fmt(max_sign) + " residual_violations=" +
              std::to_string(bad_residual) + " sign_violations=" + std::to_string(bad_sign),
          20.0};
}

Outcome ols_identity() {
  const auto bundles = simulated_bundles(500);
  int violations = 0;
  double worst = 0.0;
  for (const auto& b : bundles) {
    const auto fit = ols_fit(b);
    worst = std::max(worst, fit.identity_residual / (1.0 + fit.error_frobenius));
    violations += !fit.identity_holds(1e-8);
  }
  return {violations == 0,
          "bundles=500 max_rel_residual=" + fmt(worst) + " violations=" +
              std::to_string(violations),
          30.0};
}

Outcome deterministic_sandwiches() {
  const auto bundles = simulated_bundles(500);
  int checked = 0, violations = 0;
  double min_upper = 1e300, min_lower = 1e300;
  for (const auto& b : bundles) {
    const auto rep = spectrum(b.x_minus());
    if (rep.degenerate) continue;
    ++checked;
    const double err = ols_fit(b).error_frobenius;
    const auto eb = error_bounds(b, rep);
    violations += !eb.deterministic_hold(err);
    min_upper = std::min({min_upper, eb.upper_svd / err, eb.sandwich_frob_upper / err});
    min_lower = std::min({min_lower, err / eb.lower_svd, err / eb.sandwich_frob_lower});
  }
  return {violations == 0 && checked > 0,
          "full_rank=" + std::to_string(checked) + " violations=" + std::to_string(violations) +
              " min_upper/error=" + fmt(min_upper) + " min_error/lower=" + fmt(min_lower)};
}

Outcome gershgorin_interlacing() {
  std::vector<MatrixXd> xs = random_matrices(1000);
  for (const auto& b : simulated_bundles(200)) xs.push_back(b.x_minus());
  int disc = 0, interlace = 0, cap = 0, pairs = 0;
  for (const auto& x : xs) {
    const auto cov = sample_covariance(x);
    disc += !gershgorin(cov).contains_all;
    for (Index k = 1; k < x.rows(); ++k) {
      ++pairs;
      interlace += !interlacing_check(cov, k).holds;
    }
    const VectorXd ev = descending_eigenvalues(cov.sigma);
    cap += !(ev(ev.size() - 1) <= x.row(x.rows() - 1).squaredNorm() * (1.0 + 1e-12));
  }
  return {disc == 0 && interlace == 0 && cap == 0,
          "instances=" + std::to_string(xs.size()) + " interlacing_pairs=" +
              std::to_string(pairs) + " disc_violations=" + std::to_string(disc) +
              " interlacing_violations=" + std::to_string(interlace) +
              " lambda_n_cap_violations=" + std::to_string(cap)};
}

Outcome moment_oracles() {
  constexpr int kTrials = 400;
  constexpr double kRho = 0.6;
  auto reg = StatisticRegistry::builtin();
  reg.add("gram_11_sq", [](const DataBundle& b) {
    const double g = b.x_minus().row(0).squaredNorm();
    return g * g;
  });
  reg.add("gram_12_sq", [](const DataBundle& b) {
    const double g = b.x_minus().row(0).dot(b.x_minus().row(1));
    return g * g;
  });
  struct Gate {
    std::string name;
    TrialPlan plan;
    double oracle;
  };
  std::vector<Gate> gates;
  std::uint64_t seed = kSeed;
  for (double lambda : {0.5, 0.9}) {
    for (int N : {500, 2000}) {
      const auto diag = make_spec(HermitianDiagonal{{lambda}});
      const auto pair = make_spec(HermitianDiagonal{{lambda, kRho}});
      const auto jordan = make_spec(JordanBlock{lambda, 3});
      const std::string at = "(" + fmt(lambda) + "," + std::to_string(N) + ")";
      gates.push_back({"row_mean" + at, {diag, N, kTrials, ++seed, "gram_11"},
                       hermitian_row_mean(lambda, N)});
      gates.push_back({"row_second" + at, {diag, N, kTrials, ++seed, "gram_11_sq"},
                       hermitian_diagonal_moments(lambda, N).second_moment});
      gates.push_back({"cross_mean" + at, {pair, N, kTrials, ++seed, "gram_12"},
                       hermitian_cross_second_moment(lambda, kRho, N).mean});
      gates.push_back({"cross_second" + at, {pair, N, kTrials, ++seed, "gram_12_sq"},
                       hermitian_cross_second_moment(lambda, kRho, N).second_moment});
      gates.push_back({"adjacent_mean" + at, {jordan, N, kTrials, ++seed, "adjacent_gram"},
                       swsscs_adjacent_mean(lambda, N)});
    }
  }
  int failed = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& g : gates) {
    const auto v = compare_to_oracle(run_trials(g.plan, reg, workers()), g.oracle, 3.0);
    failed += !v.pass;
    if (v.z_score > worst) {
      worst = v.z_score;
      worst_name = g.name;
    }
  }
  return {failed == 0,
          "gates=" + std::to_string(gates.size()) + " trials=" + std::to_string(kTrials) +
              " failed=" + std::to_string(failed) + " max_z=" + fmt(worst) + " at " + worst_name,
          120.0};
}

// Median |y_1|^2 / N at the final checkpoint, per n.
std::vector<double> final_medians(const FigureResult& fig) {
  std::vector<double> out;
  for (const auto& c : fig.curves) out.push_back(c.median.back());
  return out;
}

Outcome curse_of_dimensionality() {
  ExperimentConfig c;
  c.workers = workers();
  c.seed = kSeed;
  const auto curse = run_figure("row-curse", c);
  const auto control = run_figure("row-no-curse", c);
  const auto m = final_medians(curse);
  const auto mc = final_medians(control);
  const double span = 16 - 12;
  const double per_n = std::pow(m.back() / m.front(), 1.0 / span);
  const double target = 4 * 0.95 * 0.95 * 0.5;
  const double control_factor = mc.back() / mc.front();
  const bool main_ok = per_n >= target;
  const bool control_ok = control_factor >= 0.5 && control_factor <= 2.0;
  return {main_ok && control_ok,
          "lambda=0.95 per_n_factor=" + fmt(per_n) + " (need >= " + fmt(target) + ", " +
              (main_ok ? "ok" : "fail") + "); lambda=0.47 overall_factor=" +
              fmt(control_factor) + " (need [0.5, 2], " + (control_ok ? "ok" : "fail") + ")",
          180.0};
}

Outcome sigma1_tracks_row() {
  int violations = 0;
  int count = 0;
  const auto check = [&](const MatrixXd& x) {
    ++count;
    violations += !(singular_values(x)(0) >= x.rowwise().norm().maxCoeff() * (1.0 - 1e-12));
  };
  for (const auto& x : random_matrices(1000)) check(x);
  const TrialPlan plan{make_spec(JordanBlock{0.95, 14}), 3000, 30, kSeed, "sigma1_over_top_row"};
  std::vector<std::optional<DataBundle>> bundles(plan.trials);
  parallel_for(bundles.size(), workers(), [&](std::size_t t) {
    bundles[t].emplace(simulate(plan.spec, plan.N, plan.base_seed, t));
  });
  for (const auto& b : bundles) check(b->x_minus());
  const double med = median(run_samples(plan, StatisticRegistry::builtin(), workers()));
  return {violations == 0 && med <= 2.0,
          "instances=" + std::to_string(count) + " violations=" + std::to_string(violations) +
              " median_sigma1/|y1|(0.95,14)=" + fmt(med)};
}

Outcome talagrand_dichotomy() {
  const std::vector<int> ns{10, 13, 16, 19};
  constexpr int kN = 4000, kTrials = 100;
  const auto h = scaling_study(Family::Hermitian, 0.9, ns, kN, kTrials, kSeed, workers());
  const auto j = scaling_study(Family::Jordan, 0.95, ns, kN, kTrials, kSeed, workers());
  double q99 = 0.0;
  for (const auto& p : h.points) q99 = std::max(q99, p.q99);
  const double target = alpha_lambda(0.95) / 2.0;
  const bool herm_ok = q99 <= 11.0;
  const bool sign_ok = j.slope > 0.0 && j.ci_excludes_zero();
  const bool window_ok = std::abs(j.slope - target) <= 0.5 * target;
  return {herm_ok && sign_ok && window_ok,
          "hermitian max_q99=" + fmt(q99) + " (<= 11, " + (herm_ok ? "ok" : "fail") +
              "); jordan slope=" + fmt(j.slope) + " ci=[" + fmt(j.ci_low) + "," +
              fmt(j.ci_high) + "] (" + (sign_ok ? "ok" : "fail") + "); window " +
              fmt(target) + "+-50% (" + (window_ok ? "ok" : "fail") + ")",
          300.0};
}

Outcome ols_transience() {
  ExperimentConfig c;
  c.workers = workers();
  c.seed = kSeed;
  const auto fig = run_figure("ols-transience", c);
  const auto at = [&](const CurveData& curve, double N) {
    const auto it = std::find(curve.x.begin(), curve.x.end(), N);
    return curve.median[it - curve.x.begin()];
  };
  const auto& err = fig.curves[0];
  const auto& noise = fig.curves[1];
  const auto& herm = fig.curves[2];
  const double e500 = at(err, 500), e4000 = at(err, 4000);
  const double h500 = at(herm, 500), h8000 = at(herm, 8000);
  const bool ok = e4000 >= 0.5 * e500 && e4000 >= 0.05 && h8000 < h500;
  return {ok,
          "jordan(0.95,15) median_error N=500:" + fmt(e500) + " N=4000:" + fmt(e4000) +
              " noise_term N=500:" + fmt(at(noise, 500)) + " N=4000:" + fmt(at(noise, 4000)) +
              "; hermitian(0.5,4) N=500:" + fmt(h500) + " N=8000:" + fmt(h8000),
          300.0};
}

Outcome frobenius_closed_form_match() {
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const int n = 1 + s % 6;
    const int N = 40 - s % 5;
    const double lambda = 0.5 + 0.45 * (s % 4) / 3.0;
    const auto b = simulate(make_spec(JordanBlock{lambda, n}), N, kSeed, s);
    const double direct = b.x_minus().squaredNorm();
    const double cf = frobenius_closed_form(lambda, n, b.noise());
    worst = std::max(worst, std::abs(cf - direct) / direct);
  }
  return {worst <= 1e-8, "seeds=20 max_rel_gap=" + fmt(worst)};
}

#ifndef LDS_LAB_BIN
#error "LDS_LAB_BIN must name the CLI binary"
#endif

Outcome reproducibility() {
  const fs::path work = fs::temp_directory_path() / "ldslab_acceptance_repro";
  fs::remove_all(work);
  const auto run = [&](const std::string& tag, int w) {
    const fs::path dir = work / tag;
    const std::string cmd = std::string("\"") + LDS_LAB_BIN + "\" verify --workers " +
                            std::to_string(w) + " --out \"" + dir.string() + "\" > \"" +
                            (work / (tag + ".stdout")).string() + "\" 2>&1";
    fs::create_directories(work);
    const int status = std::system(cmd.c_str());
    // stdout names the output directory; mask it before comparing
    std::string console = read_text(work / (tag + ".stdout"));
    for (auto pos = console.find(dir.string()); pos != std::string::npos;
         pos = console.find(dir.string())) {
      console.replace(pos, dir.string().size(), "<out>");
    }
    return std::make_pair(status, read_text(dir / "verify_report.json") + console);
  };
  const auto a = run("first", 1);
  const auto b = run("second", 1);
  const auto c = run("parallel", 8);
  const bool clean = a.first == 0 && b.first == 0 && c.first == 0;
  const bool same_runs = a.second == b.second;
  const bool same_workers = a.second == c.second;
  return {clean && same_runs && same_workers,
          std::string("exit_ok=") + (clean ? "yes" : "no") + " identical_runs=" +
              (same_runs ? "yes" : "no") + " identical_workers_1_vs_8=" +
              (same_workers ? "yes" : "no") + " bytes=" + std::to_string(a.second.size())};
}

const std::vector<std::function<Outcome()>>& criteria() {
  static const std::vector<std::function<Outcome()>> list{
      negative_second_moment, precision_matrix,  ols_identity,
      deterministic_sandwiches, gershgorin_interlacing, moment_oracles,
      curse_of_dimensionality, sigma1_tracks_row, talagrand_dichotomy,
      ols_transience,         frobenius_closed_form_match, reproducibility};
  return list;
}

bool run_one(int k) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = criteria()[k - 1]();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = out.pass;
  std::string timing = fmt(seconds) + " s";
  if (out.limit_seconds > 0) {
    timing += ", limit " + fmt(out.limit_seconds) + " s";
    pass = pass && seconds < out.limit_seconds;
  }
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << k << ": " << out.metrics << " ("
            << timing << ")" << std::endl;
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "criterion number, 0 runs all")
      ->check(CLI::Range(0, static_cast<int>(criteria().size())));
  CLI11_PARSE(app, argc, argv);
  bool ok = true;
  if (criterion > 0) {
    ok = run_one(criterion);
  } else {
    for (int k = 1; k <= static_cast<int>(criteria().size()); ++k) ok = run_one(k) && ok;
  }
  return ok ? 0 : 1;
}
