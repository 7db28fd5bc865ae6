#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ldslab/errors.hpp"
#include "ldslab/model.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/spectra.hpp"
#include "ldslab/verify.hpp"

using namespace ldslab;

namespace {

DataBundle scalar_bundle(double a, const std::vector<double>& xm, const std::vector<double>& e) {
  MatrixXd x_minus(1, xm.size()), noise(1, e.size());
  for (std::size_t i = 0; i < xm.size(); ++i) x_minus(0, i) = xm[i];
  for (std::size_t i = 0; i < e.size(); ++i) noise(0, i) = e[i];
  MatrixXd m(1, 1);
  m << a;
  return DataBundle(make_spec(Dense{m}), x_minus, a * x_minus + noise, noise, 0);
}

}  // namespace

TEST(OlsFit, NoiselessRecovery) {
  const auto r = ols_fit(scalar_bundle(0.5, {1, 2, 3}, {0, 0, 0}));
  EXPECT_NEAR(r.a_hat(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r.error_frobenius, 0.0, 1e-15);
  EXPECT_TRUE(r.full_rank);
}

TEST(OlsFit, HandPseudoInverse) {
  for (double a : {0.0, 0.3, -0.8}) {
    const auto r = ols_fit(scalar_bundle(a, {1, 2}, {1, -1}));
    EXPECT_NEAR(r.error_frobenius, 0.2, 1e-14);
    EXPECT_NEAR(r.noise_error, 0.2, 1e-14);
  }
}

TEST(OlsFit, IdentityOnSimulations) {
  const auto spec = make_spec(HermitianDiagonal{{0.5, 0.5, 0.5}});
  std::vector<double> errors;
  for (int seed = 0; seed < 50; ++seed) {
    const auto r = ols_fit(simulate(spec, 5000, seed));
    EXPECT_TRUE(r.identity_holds()) << seed << " " << r.identity_residual;
    errors.push_back(r.error_frobenius);
  }
  std::nth_element(errors.begin(), errors.begin() + 25, errors.end());
  // sqrt(n^2 (1 - lambda^2) / N) = 0.0367
  EXPECT_NEAR(errors[25], 0.0367, 0.01);
}

TEST(OlsFit, RankDeficientFlagged) {
  const auto spec = make_spec(HermitianDiagonal{{0.5, 0.5}});
  MatrixXd noise = MatrixXd::Zero(2, 10);
  noise.row(0).setRandom();
  const auto r = ols_fit(simulate_with_noise(spec, noise));
  EXPECT_FALSE(r.full_rank);
  EXPECT_EQ(r.rank, 1);
  EXPECT_TRUE(r.a_hat.allFinite());
}

TEST(ErrorBounds, ZeroNoise) {
  const auto b = scalar_bundle(0.5, {1, 2, 3}, {0, 0, 0});
  const auto eb = error_bounds(b, spectrum(b.x_minus()));
  EXPECT_EQ(eb.lower_svd, 0.0);
  EXPECT_EQ(eb.sandwich_frob_lower, 0.0);
  EXPECT_TRUE(eb.deterministic_hold(0.0));
}

TEST(ErrorBounds, ScalarCaseIsTight) {
  const auto b = scalar_bundle(0.4, {0.3, -1.0, 2.0, 0.5}, {0.7, 0.1, -0.4, 1.2});
  const auto r = ols_fit(b);
  const auto eb = error_bounds(b, spectrum(b.x_minus()));
  EXPECT_NEAR(eb.lower_svd, r.error_frobenius, 1e-14);
  EXPECT_NEAR(eb.upper_svd, r.error_frobenius, 1e-14);
  EXPECT_NEAR(eb.sandwich_frob_lower, r.error_frobenius, 1e-14);
  EXPECT_NEAR(eb.sandwich_frob_upper, r.error_frobenius, 1e-14);
}

TEST(ErrorBounds, OrderingOnRandomInstances) {
  for (int seed = 0; seed < 30; ++seed) {
    const auto b = simulate(make_spec(JordanBlock{0.6, 4}), 100, seed);
    const auto r = ols_fit(b);
    const auto eb = error_bounds(b, spectrum(b.x_minus()));
    EXPECT_TRUE(eb.deterministic_hold(r.error_frobenius)) << seed;
    EXPECT_LE(eb.lower_svd, eb.upper_svd);
    EXPECT_LE(eb.lower_2mom, eb.upper_2mom);
    EXPECT_LE(eb.sandwich_frob_lower, eb.sandwich_frob_upper);
  }
}

TEST(ErrorBounds, DegenerateThrows) {
  const auto spec = make_spec(HermitianDiagonal{{0.5, 0.5}});
  MatrixXd noise = MatrixXd::Zero(2, 10);
  noise.row(0).setOnes();
  const auto b = simulate_with_noise(spec, noise);
  EXPECT_THROW(error_bounds(b, spectrum(b.x_minus())), DegenerateRows);
}

TEST(ResidualColumns, OrthogonalRows) {
  MatrixXd x(2, 3);
  x << 1, 0, 0, 0, 2, 0;
  const auto rc = residual_columns(x);
  EXPECT_TRUE(rc.columns.col(0).isApprox(Eigen::Vector3d(1, 0, 0)));
  EXPECT_TRUE(rc.columns.col(1).isApprox(Eigen::Vector3d(0, 0.5, 0)));
  EXPECT_LE(rc.norm_residual, 1e-14);
}

TEST(ResidualColumns, ScalarAndRandom) {
  MatrixXd x(1, 3);
  x << 1, 2, 2;
  const auto one = residual_columns(x);
  EXPECT_NEAR(one.columns.col(0).norm(), 1.0 / 3.0, 1e-15);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto rc = residual_columns(random_instance(5, k));
    EXPECT_LE(rc.normal_eq_residual, 1e-8) << k;
    EXPECT_LE(rc.norm_residual, 1e-8) << k;
  }
  MatrixXd bad(2, 3);
  bad << 1, 1, 1, 2, 2, 2;
  EXPECT_THROW(residual_columns(bad), SingularCovariance);
}

TEST(UnitaryInvariance, IdentityPermutationRotation) {
  const auto b3 = simulate(make_spec(JordanBlock{0.7, 3}), 80, 2);
  EXPECT_EQ(unitary_invariance_check(b3, MatrixXd::Identity(3, 3)), 0.0);
  MatrixXd perm = MatrixXd::Zero(3, 3);
  perm(0, 2) = perm(1, 0) = perm(2, 1) = 1.0;
  EXPECT_LE(unitary_invariance_check(b3, perm), 1e-10);
  const auto b4 = simulate(make_spec(HermitianDiagonal{{0.9, 0.5, -0.2, 0.1}}), 120, 3);
  EXPECT_LE(unitary_invariance_check(b4, random_orthogonal(4, 1, 0)), 1e-8);
  EXPECT_THROW(unitary_invariance_check(b3, 2.0 * MatrixXd::Identity(3, 3)), NotOrthogonal);
}

TEST(SwsscsSandwich, OrderedAndValidated) {
  const auto [lo, hi] = sandwich_bound_swsscs(4, 500, 0.6);
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(lo, hi);
  EXPECT_THROW(sandwich_bound_swsscs(4, 500, 1.5), BadParameter);
}

TEST(SquaredResidual, TrueMatrixGivesNoiseEnergy) {
  const auto b = simulate(make_spec(JordanBlock{0.5, 3}), 60, 1);
  EXPECT_NEAR(squared_residual(b, b.spec().matrix()), b.noise().squaredNorm(), 1e-10);
  const auto r = ols_fit(b);
  EXPECT_LE(squared_residual(b, r.a_hat), squared_residual(b, b.spec().matrix()));
}
