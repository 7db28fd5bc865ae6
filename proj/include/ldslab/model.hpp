#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ldslab/linalg.hpp"

namespace ldslab {

// Canonical system descriptions accepted by make_spec.

struct HermitianDiagonal {
  std::vector<double> eigs;
};

/// J_n(lambda): lambda on the diagonal, ones on the superdiagonal.
struct JordanBlock {
  double lambda = 0.0;
  int size = 1;
};

struct BlockDiagonal {
  std::vector<JordanBlock> blocks;
};

struct Dense {
  MatrixXd matrix;
};

using SpecDescription =
    std::variant<HermitianDiagonal, JordanBlock, BlockDiagonal, Dense>;

/// A validated stable transition matrix together with the canonical
/// description it was built from. Only make_spec constructs one.
class SystemSpec {
 public:
  const SpecDescription& description() const { return description_; }
  const MatrixXd& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  double spectral_radius() const { return spectral_radius_; }
  std::string_view variant_name() const;

  /// Non-null iff the spec is a single Jordan block.
  const JordanBlock* jordan() const {
    return std::get_if<JordanBlock>(&description_);
  }

  /// Blocks of a canonical spec: diagonal entries become 1x1 blocks and a
  /// single Jordan block is returned as itself. Empty for Dense.
  std::vector<JordanBlock> canonical_blocks() const;

 private:
  friend SystemSpec make_spec(SpecDescription description);
  SystemSpec(SpecDescription description, MatrixXd matrix, double rho)
      : description_(std::move(description)),
        matrix_(std::move(matrix)),
        spectral_radius_(rho) {}

  SpecDescription description_;
  MatrixXd matrix_;
  double spectral_radius_;
};

/// Validates the description and materializes A.
/// Throws BadParameter or SpectralRadiusViolation.
SystemSpec make_spec(SpecDescription description);

/// One simulated trajectory from x_0 = 0.
///
/// Column i of x_minus holds x_i for i = 0..N-1, column i of x_plus holds
/// x_{i+1}, column i of noise holds w_i, and x_{i+1} = A x_i + w_i.
class DataBundle {
 public:
  DataBundle(SystemSpec spec, MatrixXd x_minus, MatrixXd x_plus,
             MatrixXd noise, std::uint64_t seed, std::uint64_t trial = 0);

  const SystemSpec& spec() const { return spec_; }
  const MatrixXd& x_minus() const { return x_minus_; }
  const MatrixXd& x_plus() const { return x_plus_; }
  const MatrixXd& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial() const { return trial_; }
  int dim() const { return static_cast<int>(x_minus_.rows()); }
  int length() const { return static_cast<int>(x_minus_.cols()); }

 private:
  SystemSpec spec_;
  MatrixXd x_minus_;
  MatrixXd x_plus_;
  MatrixXd noise_;
  std::uint64_t seed_;
  std::uint64_t trial_;
};

/// Noise matrix w_0..w_{N-1} for (seed, trial); entry (k, t) is
/// NoiseField(seed).normal(trial, t, k).
MatrixXd gaussian_noise(int n, int N, std::uint64_t seed,
                        std::uint64_t trial = 0);

/// Throws ShortTrajectory if N <= n.
DataBundle simulate(const SystemSpec& spec, int N, std::uint64_t seed,
                    std::uint64_t trial = 0);

/// Simulation driven by an explicit noise matrix (n x N).
DataBundle simulate_with_noise(const SystemSpec& spec, MatrixXd noise);

struct BundleCheck {
  double transition_residual = 0.0;  // max column |X+ - A X- - E| / scale
  double initial_state_norm = 0.0;   // |x_0|
  double unrolled_residual = 0.0;    // |x_i - sum_t A^{i-t} w_{t-1}| / scale
  int columns_unrolled = 0;

  static constexpr double kTransitionTol = 1e-12;
  static constexpr double kUnrolledTol = 1e-10;

  bool ok() const;
  /// Name of the first violated invariant, empty when ok().
  std::string violation() const;
};

/// Checks the bundle invariants; the unrolled-sum check covers the first
/// max_unrolled columns.
BundleCheck check_bundle(const DataBundle& bundle, int max_unrolled = 256);

/// C(k, m) lambda^(k-m) evaluated in log space.
double binomial_power(int k, int m, double lambda);

/// Entry x_i[j] of a Jordan-block trajectory from its noise, via
/// sum_t sum_m C(i-t, m) lambda^(i-t-m) <w_{t-1}, e_{m+j}>.
/// row is 1-based (1..n); column is the time index i in 0..N, so
/// column N addresses the last column of X+.
double closed_form_entry(const JordanBlock& block, int row, int column,
                         const MatrixXd& noise);

/// Solves A^T P A - P + I = 0. Diagonal and Jordan structured specs use a
/// direct recursion; Dense uses fixed-point iteration.
MatrixXd solve_lyapunov(const SystemSpec& spec);

/// Fixed-point iteration P <- A^T P A + I. Stops when the relative change is
/// at most 1e-13; throws NonConvergent after max_iterations.
MatrixXd solve_lyapunov_iterative(const MatrixXd& a,
                                  int max_iterations = 100000);

/// max |A^T P A - P + I|.
double lyapunov_residual(const MatrixXd& a, const MatrixXd& p);

/// Stationary state covariance: solves A P A^T - P + I = 0.
MatrixXd stationary_covariance(const SystemSpec& spec);

struct PowerNormRatio {
  double actual;  // |A^k|_2
  double bound;   // max_i k^D_i |l_i|^k (1-|l_i|)/(1-|l_i|^(D_i+1))
  double ratio;   // actual / bound
};

/// Diagnostic only; the bound as written carries no constant and can be
/// exceeded.
PowerNormRatio power_norm_ratio(const SystemSpec& spec, int k);

struct ProjectorSet {
  std::vector<MatrixXd> projectors;

  double partition_residual() const;     // |sum P - I|
  double orthogonality_residual() const;  // max |P_a P_b|, a != b
  double idempotence_residual() const;    // max |P^2 - P|
};

/// Coordinate projectors onto each canonical block. Throws UnsupportedSpec
/// for Dense.
ProjectorSet projector_decomposition(const SystemSpec& spec);

}  // namespace ldslab
