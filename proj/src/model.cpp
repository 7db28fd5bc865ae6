#include "ldslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "ldslab/errors.hpp"
#include "ldslab/rng.hpp"

namespace ldslab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw BadParameter(std::string(what) + " must be finite");
  }
}

void validate_jordan(const JordanBlock& block) {
  require_finite(block.lambda, "Jordan eigenvalue");
  if (block.size < 1) {
    throw BadParameter("Jordan block size must be >= 1");
  }
  if (!(block.lambda > 0.0 && block.lambda < 1.0)) {
    throw BadParameter("Jordan eigenvalue must lie in (0, 1), got " +
                       std::to_string(block.lambda));
  }
}

MatrixXd jordan_matrix(const JordanBlock& block) {
  MatrixXd a = block.lambda * MatrixXd::Identity(block.size, block.size);
  for (int i = 0; i + 1 < block.size; ++i) a(i, i + 1) = 1.0;
  return a;
}

// Direct solution of J^T P J - P + I = 0 for one Jordan block, filled in
// increasing (j, k) order.
MatrixXd jordan_lyapunov(const JordanBlock& block) {
  const int n = block.size;
  const double lam = block.lambda;
  const double denom = 1.0 - lam * lam;
  MatrixXd p = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double acc = (j == k) ? 1.0 : 0.0;
      if (j > 0) acc += lam * p(j - 1, k);
      if (k > 0) acc += lam * p(j, k - 1);
      if (j > 0 && k > 0) acc += p(j - 1, k - 1);
      p(j, k) = acc / denom;
    }
  }
  return p;
}

struct EigenMultiplicity {
  double modulus;
  int defect;  // algebraic minus geometric multiplicity
};

std::vector<EigenMultiplicity> canonical_multiplicities(
    const std::vector<JordanBlock>& blocks) {
  std::vector<std::pair<double, std::pair<int, int>>> groups;  // lambda, (am, gm)
  for (const auto& b : blocks) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == b.lambda; });
    if (it == groups.end()) {
      groups.push_back({b.lambda, {b.size, 1}});
    } else {
      it->second.first += b.size;
      it->second.second += 1;
    }
  }
  std::vector<EigenMultiplicity> out;
  for (const auto& g : groups) {
    out.push_back({std::abs(g.first), g.second.first - g.second.second});
  }
  return out;
}

std::vector<EigenMultiplicity> dense_multiplicities(const MatrixXd& a) {
  const Index n = a.rows();
  Eigen::ComplexEigenSolver<MatrixXd> solver(a, false);
  const Eigen::VectorXcd eig = solver.eigenvalues();
  const double scale = std::max(1.0, a.norm());
  std::vector<bool> used(n, false);
  std::vector<EigenMultiplicity> out;
  for (Index i = 0; i < n; ++i) {
    if (used[i]) continue;
    int am = 0;
    std::complex<double> mean = 0.0;
    for (Index j = i; j < n; ++j) {
      if (!used[j] && std::abs(eig(j) - eig(i)) <= 1e-6 * scale) {
        used[j] = true;
        ++am;
        mean += eig(j);
      }
    }
    mean /= static_cast<double>(am);
    Eigen::MatrixXcd shifted = a.cast<std::complex<double>>();
    shifted.diagonal().array() -= mean;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Index k = 0; k < s.size(); ++k) {
      if (s(k) > 1e-8 * scale) ++rank;
    }
    const int gm = std::max(1, static_cast<int>(n) - rank);
    out.push_back({std::abs(mean), std::max(0, am - gm)});
  }
  return out;
}

double column_scale(const MatrixXd& a, const MatrixXd& x, const MatrixXd& e,
                    Index col) {
  return a.cwiseAbs().rowwise().sum().maxCoeff() *
             x.col(col).cwiseAbs().maxCoeff() +
         e.col(col).cwiseAbs().maxCoeff();
}

}  // namespace

std::string_view SystemSpec::variant_name() const {
  return std::visit(
      Overloaded{[](const HermitianDiagonal&) { return "HermitianDiagonal"; },
                 [](const JordanBlock&) { return "JordanBlock"; },
                 [](const BlockDiagonal&) { return "BlockDiagonal"; },
                 [](const Dense&) { return "Dense"; }},
      description_);
}

std::vector<JordanBlock> SystemSpec::canonical_blocks() const {
  return std::visit(
      Overloaded{[](const HermitianDiagonal& d) {
                   std::vector<JordanBlock> out;
                   for (double e : d.eigs) out.push_back({e, 1});
                   return out;
                 },
                 [](const JordanBlock& b) { return std::vector{b}; },
                 [](const BlockDiagonal& b) { return b.blocks; },
                 [](const Dense&) { return std::vector<JordanBlock>{}; }},
      description_);
}

SystemSpec make_spec(SpecDescription description) {
  MatrixXd a;
  double rho = 0.0;
  std::visit(
      Overloaded{
          [&](const HermitianDiagonal& d) {
            if (d.eigs.empty()) throw BadParameter("empty eigenvalue list");
            a = MatrixXd::Zero(d.eigs.size(), d.eigs.size());
            for (std::size_t i = 0; i < d.eigs.size(); ++i) {
              require_finite(d.eigs[i], "eigenvalue");
              a(i, i) = d.eigs[i];
              rho = std::max(rho, std::abs(d.eigs[i]));
            }
          },
          [&](const JordanBlock& b) {
            validate_jordan(b);
            a = jordan_matrix(b);
            rho = b.lambda;
          },
          [&](const BlockDiagonal& bd) {
            if (bd.blocks.empty()) throw BadParameter("no Jordan blocks");
            int n = 0;
            for (const auto& b : bd.blocks) {
              validate_jordan(b);
              n += b.size;
              rho = std::max(rho, b.lambda);
            }
            a = MatrixXd::Zero(n, n);
            int offset = 0;
            for (const auto& b : bd.blocks) {
              a.block(offset, offset, b.size, b.size) = jordan_matrix(b);
              offset += b.size;
            }
          },
          [&](const Dense& d) {
            if (d.matrix.rows() == 0 || d.matrix.rows() != d.matrix.cols()) {
              throw BadParameter("dense matrix must be square and non-empty");
            }
            if (!d.matrix.allFinite()) {
              throw BadParameter("dense matrix entries must be finite");
            }
            a = d.matrix;
            rho = a.eigenvalues().cwiseAbs().maxCoeff();
          }},
      description);
  if (!(rho < 1.0)) {
    std::ostringstream msg;
    msg << "spectral radius " << rho << " is not below 1";
    throw SpectralRadiusViolation(msg.str());
  }
  return SystemSpec(std::move(description), std::move(a), rho);
}

DataBundle::DataBundle(SystemSpec spec, MatrixXd x_minus, MatrixXd x_plus,
                       MatrixXd noise, std::uint64_t seed, std::uint64_t trial)
    : spec_(std::move(spec)),
      x_minus_(std::move(x_minus)),
      x_plus_(std::move(x_plus)),
      noise_(std::move(noise)),
      seed_(seed),
      trial_(trial) {
  const Index n = spec_.dim();
  if (x_minus_.rows() != n || x_plus_.rows() != n || noise_.rows() != n ||
      x_plus_.cols() != x_minus_.cols() || noise_.cols() != x_minus_.cols()) {
    throw BadParameter("bundle matrices must all be n x N");
  }
}

MatrixXd gaussian_noise(int n, int N, std::uint64_t seed,
                        std::uint64_t trial) {
  const NoiseField field(seed);
  MatrixXd e(n, N);
  for (int t = 0; t < N; ++t) {
    for (int k = 0; k < n; ++k) {
      e(k, t) = field.normal(trial, static_cast<std::uint32_t>(t),
                             static_cast<std::uint32_t>(k));
    }
  }
  return e;
}

namespace {

DataBundle run_recursion(const SystemSpec& spec, MatrixXd noise,
                         std::uint64_t seed, std::uint64_t trial) {
  const Index n = spec.dim();
  const Index N = noise.cols();
  if (noise.rows() != n) {
    throw BadParameter("noise must have one row per state coordinate");
  }
  if (N <= n) {
    throw ShortTrajectory("trajectory length N = " + std::to_string(N) +
                          " must exceed the state dimension " +
                          std::to_string(n));
  }
  const MatrixXd& a = spec.matrix();
  MatrixXd x_minus = MatrixXd::Zero(n, N);
  MatrixXd x_plus(n, N);
  for (Index i = 0; i < N; ++i) {
    x_plus.col(i).noalias() = a * x_minus.col(i);
    x_plus.col(i) += noise.col(i);
    if (i + 1 < N) x_minus.col(i + 1) = x_plus.col(i);
  }
  return DataBundle(spec, std::move(x_minus), std::move(x_plus),
                    std::move(noise), seed, trial);
}

}  // namespace

DataBundle simulate(const SystemSpec& spec, int N, std::uint64_t seed,
                    std::uint64_t trial) {
  if (N <= spec.dim()) {
    throw ShortTrajectory("trajectory length N = " + std::to_string(N) +
                          " must exceed the state dimension " +
                          std::to_string(spec.dim()));
  }
  return run_recursion(spec, gaussian_noise(spec.dim(), N, seed, trial), seed,
                       trial);
}

DataBundle simulate_with_noise(const SystemSpec& spec, MatrixXd noise) {
  return run_recursion(spec, std::move(noise), 0, 0);
}

bool BundleCheck::ok() const { return violation().empty(); }

std::string BundleCheck::violation() const {
  if (!(transition_residual <= kTransitionTol)) {
    return "transition: X_plus != A*X_minus + E";
  }
  if (!(initial_state_norm == 0.0)) return "initial-state: x_0 != 0";
  if (!(unrolled_residual <= kUnrolledTol)) {
    return "unrolled-sum: x_i != sum_t A^(i-t) w_(t-1)";
  }
  return {};
}

BundleCheck check_bundle(const DataBundle& bundle, int max_unrolled) {
  const MatrixXd& a = bundle.spec().matrix();
  const MatrixXd& xm = bundle.x_minus();
  const MatrixXd& xp = bundle.x_plus();
  const MatrixXd& e = bundle.noise();
  const Index N = xm.cols();

  BundleCheck check;
  for (Index i = 0; i < N; ++i) {
    const double err =
        (xp.col(i) - a * xm.col(i) - e.col(i)).cwiseAbs().maxCoeff();
    const double scale =
        std::max(column_scale(a, xm, e, i), std::numeric_limits<double>::min());
    check.transition_residual = std::max(check.transition_residual, err / scale);
  }
  check.initial_state_norm = N > 0 ? xm.col(0).norm() : 0.0;

  const Index limit = std::min<Index>(N, max_unrolled);
  std::vector<MatrixXd> powers{MatrixXd::Identity(a.rows(), a.cols())};
  for (Index k = 1; k < limit; ++k) powers.push_back(a * powers.back());
  for (Index i = 1; i < limit; ++i) {
    VectorXd direct = VectorXd::Zero(a.rows());
    VectorXd magnitude = VectorXd::Zero(a.rows());
    for (Index t = 1; t <= i; ++t) {
      direct.noalias() += powers[i - t] * e.col(t - 1);
      magnitude.noalias() += powers[i - t].cwiseAbs() * e.col(t - 1).cwiseAbs();
    }
    const double scale =
        std::max(magnitude.maxCoeff(), std::numeric_limits<double>::min());
    check.unrolled_residual = std::max(
        check.unrolled_residual, (xm.col(i) - direct).cwiseAbs().maxCoeff() / scale);
  }
  check.columns_unrolled = static_cast<int>(std::max<Index>(limit - 1, 0));
  return check;
}

double binomial_power(int k, int m, double lambda) {
  if (m < 0 || m > k) return 0.0;
  if (lambda == 0.0) return m == k ? 1.0 : 0.0;
  const double log_binom = std::lgamma(k + 1.0) - std::lgamma(m + 1.0) -
                           std::lgamma(k - m + 1.0);
  const double value = std::exp(log_binom + (k - m) * std::log(std::abs(lambda)));
  return (lambda < 0.0 && (k - m) % 2 == 1) ? -value : value;
}

double closed_form_entry(const JordanBlock& block, int row, int column,
                         const MatrixXd& noise) {
  const int n = block.size;
  if (noise.rows() != n) {
    throw BadParameter("noise must have one row per state coordinate");
  }
  if (row < 1 || row > n || column < 0 || column > noise.cols()) {
    throw IndexOutOfRange("entry (" + std::to_string(row) + ", " +
                          std::to_string(column) + ") outside the data matrix");
  }
  double acc = 0.0;
  for (int t = 1; t <= column; ++t) {
    const int lag = column - t;
    const int m_max = std::min(lag, n - row);
    for (int m = 0; m <= m_max; ++m) {
      acc += binomial_power(lag, m, block.lambda) * noise(row - 1 + m, t - 1);
    }
  }
  return acc;
}

MatrixXd solve_lyapunov_iterative(const MatrixXd& a, int max_iterations) {
  const Index n = a.rows();
  MatrixXd p = MatrixXd::Identity(n, n);
  const MatrixXd at = a.transpose();
  for (int it = 0; it < max_iterations; ++it) {
    MatrixXd next = at * p * a;
    next.diagonal().array() += 1.0;
    const double change = (next - p).norm() / next.norm();
    p = std::move(next);
    if (change <= 1e-13) return 0.5 * (p + p.transpose());
  }
  throw NonConvergent("Lyapunov fixed-point iteration did not converge in " +
                      std::to_string(max_iterations) + " iterations");
}

double lyapunov_residual(const MatrixXd& a, const MatrixXd& p) {
  MatrixXd r = a.transpose() * p * a - p;
  r.diagonal().array() += 1.0;
  return r.cwiseAbs().maxCoeff();
}

MatrixXd solve_lyapunov(const SystemSpec& spec) {
  if (std::holds_alternative<Dense>(spec.description())) {
    return solve_lyapunov_iterative(spec.matrix());
  }
  const int n = spec.dim();
  MatrixXd p = MatrixXd::Zero(n, n);
  int offset = 0;
  for (const auto& b : spec.canonical_blocks()) {
    if (b.size == 1) {
      p(offset, offset) = 1.0 / (1.0 - b.lambda * b.lambda);
    } else {
      p.block(offset, offset, b.size, b.size) = jordan_lyapunov(b);
    }
    offset += b.size;
  }
  return p;
}

MatrixXd stationary_covariance(const SystemSpec& spec) {
  if (std::holds_alternative<Dense>(spec.description())) {
    return solve_lyapunov_iterative(spec.matrix().transpose());
  }
  // J P J^T for an upper Jordan block is the flipped version of the
  // J^T P J solution: F J F = J^T with F the exchange matrix.
  MatrixXd p = solve_lyapunov(spec);
  int offset = 0;
  for (const auto& b : spec.canonical_blocks()) {
    auto blk = p.block(offset, offset, b.size, b.size);
    blk = blk.colwise().reverse().rowwise().reverse().eval();
    offset += b.size;
  }
  return p;
}

PowerNormRatio power_norm_ratio(const SystemSpec& spec, int k) {
  if (k < 1) throw BadParameter("power must be >= 1");
  const MatrixXd& a = spec.matrix();
  MatrixXd power = a;
  for (int i = 1; i < k; ++i) power = power * a;
  Eigen::JacobiSVD<MatrixXd> svd(power);
  const double actual = svd.singularValues()(0);

  const auto multiplicities =
      std::holds_alternative<Dense>(spec.description())
          ? dense_multiplicities(a)
          : canonical_multiplicities(spec.canonical_blocks());
  double bound = 0.0;
  for (const auto& em : multiplicities) {
    if (em.modulus == 0.0) continue;
    const double term = std::pow(static_cast<double>(k), em.defect) *
                        std::pow(em.modulus, k) * (1.0 - em.modulus) /
                        (1.0 - std::pow(em.modulus, em.defect + 1));
    bound = std::max(bound, term);
  }
  double ratio;
  if (bound > 0.0) {
    ratio = actual / bound;
  } else {
    ratio = actual == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return {actual, bound, ratio};
}

double ProjectorSet::partition_residual() const {
  if (projectors.empty()) return std::numeric_limits<double>::infinity();
  MatrixXd sum = MatrixXd::Zero(projectors[0].rows(), projectors[0].cols());
  for (const auto& p : projectors) sum += p;
  return (sum - MatrixXd::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

double ProjectorSet::orthogonality_residual() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    for (std::size_t b = 0; b < projectors.size(); ++b) {
      if (a == b) continue;
      worst = std::max(worst,
                       (projectors[a] * projectors[b]).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double ProjectorSet::idempotence_residual() const {
  double worst = 0.0;
  for (const auto& p : projectors) {
    worst = std::max(worst, (p * p - p).cwiseAbs().maxCoeff());
  }
  return worst;
}

ProjectorSet projector_decomposition(const SystemSpec& spec) {
  if (std::holds_alternative<Dense>(spec.description())) {
    throw UnsupportedSpec("projector decomposition needs a canonical spec");
  }
  const int n = spec.dim();
  ProjectorSet set;
  int offset = 0;
  for (const auto& b : spec.canonical_blocks()) {
    MatrixXd p = MatrixXd::Zero(n, n);
    p.diagonal().segment(offset, b.size).setOnes();
    set.projectors.push_back(std::move(p));
    offset += b.size;
  }
  return set;
}

}  // namespace ldslab
