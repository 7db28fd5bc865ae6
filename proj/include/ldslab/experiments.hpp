#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldslab/io.hpp"
#include "ldslab/model.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/svg.hpp"
#include "ldslab/talagrand.hpp"

namespace ldslab {

/// Everything a CLI invocation can set. Unset optionals take per-command
/// defaults.
struct ExperimentConfig {
  std::string command;
  std::string family = "jordan";
  std::optional<double> lambda;
  std::optional<double> rho;        // oracle table
  std::vector<double> lambda_list;  // sweep
  std::vector<double> eigs;         // explicit Hermitian spectrum
  std::optional<int> n;
  std::vector<int> n_list;
  std::optional<int> N;
  std::vector<int> N_list;
  std::optional<int> trials;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  bool plot = false;
  int workers = 1;
  int max_N = 8000;
  int max_trials = 50;
  int max_cells = 256;

  /// Applies a parsed key=value config file. Unknown keys throw
  /// BadParameter.
  void apply(const std::map<std::string, std::string>& kv);
};

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Ranges checked before any computation. Throws BadParameter.
void validate_common(const ExperimentConfig& config);

/// Spec from family/lambda/n, or from eigs when given.
SystemSpec config_spec(const ExperimentConfig& config, double lambda, int n);

/// Bundle restricted to its first N columns. Noise is counter-based, so
/// this equals simulate(spec, N, seed, trial) exactly.
DataBundle prefix(const DataBundle& bundle, int N);

/// Per-bundle OLS numbers; bounds are NaN when the rows are degenerate.
struct CellMetrics {
  double error = 0.0;
  double noise_error = 0.0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = 0.0;
  double talagrand = 0.0;
  ErrorBounds bounds;
  bool bounds_valid = false;
  double swsscs_lower = 0.0;  // NaN unless the spec is a Jordan block
  double swsscs_upper = 0.0;
};

CellMetrics evaluate_bundle(const DataBundle& bundle);

struct CurveData {
  std::string label;
  std::vector<double> x;
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
};

struct FigureResult {
  std::string name;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<CurveData> curves;
  /// samples[curve][point] holds the per-trial values behind each median.
  std::vector<std::vector<std::vector<double>>> samples;
};

const std::vector<std::string>& figure_names();

/// Throws UnknownFigure.
FigureResult run_figure(const std::string& name, const ExperimentConfig& config);

/// One CSV per curve (x, median, q25, q75) in dir, and dir/<name>.svg when
/// plot is set. Returns the written paths.
std::vector<std::filesystem::path> write_figure(const FigureResult& figure,
                                                const std::filesystem::path& dir,
                                                bool plot);

inline constexpr const char* kSweepHeader =
    "family,lambda,n,N,trials,seed,median_error,median_noise_error,"
    "median_sigma_max,median_sigma_min,median_kappa,median_talagrand,"
    "median_lower_svd,median_upper_svd,median_lower_2mom,median_upper_2mom,"
    "median_sandwich_lower,median_sandwich_upper,median_combined_upper,"
    "swsscs_lower,swsscs_upper,bounds_valid_fraction";

struct SweepRow {
  std::string family;
  double lambda = 0.0;
  int n = 0;
  int N = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  CellMetrics median;  // coordinate-wise medians over trials
  double bounds_valid_fraction = 0.0;
};

std::string sweep_row_csv(const SweepRow& row);

/// Grid over lambda_list x n_list x N_list (each defaulting to the scalar
/// flag). Trial t of every cell uses simulate(spec, N, seed, t). Throws
/// GridTooLarge above max_cells.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

}  // namespace ldslab
