#include "ldslab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldslab/errors.hpp"
#include "ldslab/io.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/spectra.hpp"
#include "ldslab/talagrand.hpp"

namespace ldslab {

void StatisticRegistry::add(std::string name, Statistic fn) {
  table_[std::move(name)] = std::move(fn);
}

bool StatisticRegistry::contains(const std::string& name) const {
  return table_.count(name) > 0;
}

const Statistic& StatisticRegistry::get(const std::string& name) const {
  const auto it = table_.find(name);
  if (it == table_.end()) {
    throw StatisticNotRegistered("statistic '" + name + "' is not registered");
  }
  return it->second;
}

std::vector<std::string> StatisticRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : table_) out.push_back(name);
  return out;
}

namespace {

double row_inner(const DataBundle& b, Index j, Index k) {
  const auto& x = b.x_minus();
  if (j >= x.rows() || k >= x.rows()) {
    throw IndexOutOfRange("statistic needs more rows than the system has");
  }
  return x.row(j).dot(x.row(k));
}

StatisticRegistry make_builtin() {
  StatisticRegistry r;
  r.add("constant_one", [](const DataBundle&) { return 1.0; });
  r.add("gram_11", [](const DataBundle& b) { return row_inner(b, 0, 0); });
  r.add("gram_12", [](const DataBundle& b) { return row_inner(b, 0, 1); });
  r.add("adjacent_gram", [](const DataBundle& b) {
    const Index n = b.dim();
    if (n < 2) throw IndexOutOfRange("adjacent_gram needs n >= 2");
    return row_inner(b, n - 2, n - 1);
  });
  r.add("top_row_norm_sq", [](const DataBundle& b) { return row_inner(b, 0, 0); });
  r.add("ols_error", [](const DataBundle& b) { return ols_fit(b).error_frobenius; });
  r.add("noise_error", [](const DataBundle& b) { return ols_fit(b).noise_error; });
  r.add("talagrand_ratio",
        [](const DataBundle& b) { return talagrand_ratio(b).ratio; });
  r.add("sigma1",
        [](const DataBundle& b) { return singular_values(b.x_minus())(0); });
  r.add("sigma1_over_top_row", [](const DataBundle& b) {
    return singular_values(b.x_minus())(0) / b.x_minus().row(0).norm();
  });
  r.add("martingale_sigma1_sq", [](const DataBundle& b) {
    const double s = singular_values(b.noise() * b.x_minus().transpose())(0);
    return s * s;
  });
  r.add("last_state_sq",
        [](const DataBundle& b) { return b.x_plus().col(b.length() - 1).squaredNorm(); });
  return r;
}

}  // namespace

const StatisticRegistry& StatisticRegistry::builtin() {
  static const StatisticRegistry registry = make_builtin();
  return registry;
}

std::string TrialPlan::serialize() const {
  std::ostringstream out;
  out << spec_to_kv(spec);
  out << "N=" << N << "\n";
  out << "trials=" << trials << "\n";
  out << "base_seed=" << base_seed << "\n";
  out << "statistic=" << statistic << "\n";
  return out.str();
}

double quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw BadParameter("quantile of an empty sample");
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile(values, 0.5);
}

EstimateWithCI summarize(std::span<const double> samples,
                         std::uint64_t base_seed) {
  if (samples.size() < 2) {
    throw BadParameter("an estimate needs at least 2 samples");
  }
  EstimateWithCI e;
  e.trials = static_cast<int>(samples.size());
  e.base_seed = base_seed;
  double sum = 0.0;
  for (double v : samples) sum += v;
  e.mean = sum / e.trials;
  double ss = 0.0;
  for (double v : samples) ss += (v - e.mean) * (v - e.mean);
  e.std = std::sqrt(ss / (e.trials - 1));
  e.standard_error = e.std / std::sqrt(static_cast<double>(e.trials));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t q = 0; q < e.quantiles.size(); ++q) {
    e.quantiles[q] = quantile(sorted, EstimateWithCI::kQuantileLevels[q]);
  }
  return e;
}

std::vector<double> run_samples(const TrialPlan& plan,
                                const StatisticRegistry& registry,
                                int workers) {
  const Statistic& stat = registry.get(plan.statistic);
  if (plan.trials < 2) throw BadParameter("a trial plan needs M >= 2");
  std::vector<double> out(plan.trials);
  parallel_for(out.size(), workers, [&](std::size_t t) {
    out[t] = stat(simulate(plan.spec, plan.N, plan.base_seed, t));
  });
  return out;
}

EstimateWithCI run_trials(const TrialPlan& plan,
                          const StatisticRegistry& registry, int workers) {
  const auto samples = run_samples(plan, registry, workers);
  return summarize(samples, plan.base_seed);
}

OracleVerdict compare_to_oracle(const EstimateWithCI& estimate,
                                double oracle_value, double z) {
  const double gap = std::abs(estimate.mean - oracle_value);
  if (!(estimate.standard_error > 0.0)) {
    const bool exact = gap <= 1e-9 * std::max(1.0, std::abs(oracle_value));
    return {exact, exact ? 0.0 : std::numeric_limits<double>::infinity()};
  }
  const double score = gap / estimate.standard_error;
  return {score <= z, score};
}

}  // namespace ldslab
