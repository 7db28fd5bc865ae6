#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ldslab/model.hpp"
#include "ldslab/moments.hpp"
#include "ldslab/montecarlo.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/spectra.hpp"
#include "ldslab/talagrand.hpp"

namespace ldslab {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Space-separated round-trip list.
std::string format_list(const std::vector<double>& values);

/// key=value lines describing the spec (variant plus its parameters).
std::string spec_to_kv(const SystemSpec& spec);

/// Inverse of spec_to_kv on a parsed key=value map. Throws FormatError.
SystemSpec spec_from_kv(const std::map<std::string, std::string>& kv);

/// Flat key=value text; blank lines and lines starting with '#' are
/// skipped. Throws FormatError on a line without '='.
std::map<std::string, std::string> parse_kv(const std::string& text);
std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Matrix as CSV with header col_0..col_{c-1}, one row per matrix row.
void write_matrix_csv(std::ostream& out, const MatrixXd& m);
MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Writes x_minus.csv, x_plus.csv, noise.csv and bundle.meta into dir.
void save_bundle(const DataBundle& bundle, const std::filesystem::path& dir);

/// Loads a bundle written by save_bundle. The shape checks of DataBundle
/// apply; the transition invariants are left to check_bundle.
DataBundle load_bundle(const std::filesystem::path& dir);

/// j, sigma_j, lambda_j, distance_j, v_jj, residual_lin1, max_residual_lin2
void write_spectrum_csv(std::ostream& out, const SpectrumReport<double>& report,
                        const PrecisionReport<double>* precision);

inline constexpr const char* kOlsHeader =
    "seed,n,N,lambda,error,noise_error,lower_svd,upper_svd,lower_2mom,"
    "upper_2mom,sandwich_lower,sandwich_upper,combined_upper,kappa";

struct OlsRow {
  std::uint64_t seed = 0;
  int n = 0;
  int N = 0;
  double lambda = 0.0;
  double error = 0.0;
  double noise_error = 0.0;
  ErrorBounds bounds;
  double kappa = 0.0;
};

std::string ols_row_csv(const OlsRow& row);

/// lambda, n, N, trial, ratio
void write_talagrand_trials_csv(std::ostream& out, const ScalingStudy& study);
/// n, median_ratio, q99, log_median
void write_talagrand_summary_csv(std::ostream& out, const ScalingStudy& study);

/// name, lambda, rho, n, N, value, lower_bound, upper_bound
void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows);

/// trial, value
void write_samples_csv(std::ostream& out, const std::vector<double>& samples);
/// mean, std, standard_error, q05, q25, q50, q75, q95, q99, trials, base_seed
void write_estimate_csv(std::ostream& out, const EstimateWithCI& estimate);

}  // namespace ldslab
