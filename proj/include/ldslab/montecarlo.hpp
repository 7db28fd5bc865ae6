#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ldslab/model.hpp"

namespace ldslab {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed exactly once; the first exception is rethrown after all
/// workers join.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const std::size_t threads =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

using Statistic = std::function<double(const DataBundle&)>;

/// Named statistics over a bundle. builtin() holds the ones used by the
/// experiments; copies can be extended freely.
class StatisticRegistry {
 public:
  void add(std::string name, Statistic fn);
  bool contains(const std::string& name) const;
  /// Throws StatisticNotRegistered.
  const Statistic& get(const std::string& name) const;
  std::vector<std::string> names() const;

  static const StatisticRegistry& builtin();

 private:
  std::map<std::string, Statistic> table_;
};

struct TrialPlan {
  SystemSpec spec;
  int N = 0;
  int trials = 0;
  std::uint64_t base_seed = 0;
  std::string statistic;

  /// key=value lines, one per field.
  std::string serialize() const;
};

struct EstimateWithCI {
  static constexpr std::array<double, 6> kQuantileLevels{0.05, 0.25, 0.50,
                                                         0.75, 0.95, 0.99};
  double mean = 0.0;
  double std = 0.0;
  double standard_error = 0.0;
  std::array<double, 6> quantiles{};  // at kQuantileLevels
  int trials = 0;
  std::uint64_t base_seed = 0;

  double median() const { return quantiles[2]; }

  friend bool operator==(const EstimateWithCI&, const EstimateWithCI&) = default;
};

/// Linear interpolation between order statistics (type 7).
double quantile(std::span<const double> sorted, double level);

double median(std::vector<double> values);

EstimateWithCI summarize(std::span<const double> samples,
                         std::uint64_t base_seed = 0);

/// Per-trial values in trial order. Trial t simulates with
/// (base_seed, trial = t), so results do not depend on `workers`.
std::vector<double> run_samples(const TrialPlan& plan,
                                const StatisticRegistry& registry =
                                    StatisticRegistry::builtin(),
                                int workers = 1);

/// Throws StatisticNotRegistered or BadParameter (fewer than 2 trials).
EstimateWithCI run_trials(const TrialPlan& plan,
                          const StatisticRegistry& registry =
                              StatisticRegistry::builtin(),
                          int workers = 1);

struct OracleVerdict {
  bool pass = false;
  double z_score = 0.0;
};

/// Passes iff |mean - oracle| <= z * standard_error; with a zero standard
/// error the comparison is exact to 1e-9 (relative).
OracleVerdict compare_to_oracle(const EstimateWithCI& estimate,
                                double oracle_value, double z = 3.0);

}  // namespace ldslab
