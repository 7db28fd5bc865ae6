#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldslab/linalg.hpp"

namespace ldslab {

struct SuiteResult {
  std::string name;
  int checks = 0;
  std::vector<std::string> failures;
  std::map<std::string, double> metrics;      // gated quantities
  std::map<std::string, double> diagnostics;  // reported, never gated

  bool passed() const { return failures.empty(); }
  void expect(bool ok, const std::string& what);
  /// Keeps the largest value seen under key.
  void track_max(const std::string& key, double value);
  void track_min(const std::string& key, double value);
};

struct VerifyOptions {
  std::vector<std::string> suites;  // empty runs all
  std::optional<std::filesystem::path> bundle;
  int workers = 1;
  std::uint64_t seed = 1;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool ok() const;
  /// Names of failed checks, prefixed with their suite.
  std::vector<std::string> failures() const;
  /// JSON text; identical for identical options regardless of workers.
  std::string to_json() const;
};

const std::vector<std::string>& suite_names();

/// Throws BadParameter for an unknown suite name.
VerifyReport run_verify(const VerifyOptions& options);

/// Random full-rank test matrix k of a seeded family: n in [2, 10],
/// N in [n + 1, 100], mixing iid Gaussian rows of unequal scale with
/// simulated diagonal and Jordan trajectories.
MatrixXd random_instance(std::uint64_t seed, std::uint64_t k);

/// Random orthogonal matrix (QR of a Gaussian matrix, signs fixed).
MatrixXd random_orthogonal(int n, std::uint64_t seed, std::uint64_t k);

}  // namespace ldslab
