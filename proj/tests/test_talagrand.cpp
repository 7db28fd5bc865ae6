#include <gtest/gtest.h>

#include <cmath>

#include "ldslab/errors.hpp"
#include "ldslab/model.hpp"
#include "ldslab/talagrand.hpp"

using namespace ldslab;

TEST(Ratio, Definition) {
  const auto b = simulate(make_spec(JordanBlock{0.8, 4}), 100, 3);
  const auto s = talagrand_ratio(b);
  EXPECT_NEAR(s.ratio, b.x_minus().norm() / b.noise().norm(), 1e-14);
  EXPECT_EQ(s.n, 4);
  EXPECT_EQ(s.N, 100);
  EXPECT_FALSE(s.zero_noise);
  EXPECT_LE(s.ratio, talagrand_deterministic_bound(b));
}

TEST(Ratio, ZeroNoise) {
  const auto b = simulate_with_noise(make_spec(JordanBlock{0.8, 2}), MatrixXd::Zero(2, 10));
  const auto s = talagrand_ratio(b);
  EXPECT_TRUE(s.zero_noise);
  EXPECT_EQ(s.ratio, 0.0);
}

TEST(Ratio, BoundedByNoiseMapNorm) {
  const auto spec = make_spec(JordanBlock{0.9, 5});
  const double op = noise_map_norm(spec, 120);
  for (int t = 0; t < 20; ++t) {
    EXPECT_LE(talagrand_ratio(simulate(spec, 120, 5, t)).ratio, op * (1 + 1e-9));
  }
}

TEST(NoiseMap, ScalarApproachesGeometricSum) {
  // Toeplitz operator with impulse response 0.5^k, norm tends to 1/(1 - 0.5)
  const double op = noise_map_norm(make_spec(HermitianDiagonal{{0.5}}), 400);
  EXPECT_LT(op, 2.0);
  EXPECT_GT(op, 1.99);
}

TEST(ClosedForm, FrobeniusMatchesSimulation) {
  for (int n : {1, 3, 5}) {
    const auto b = simulate(make_spec(JordanBlock{0.85, n}), 60, 12);
    const double cf = frobenius_closed_form(0.85, n, b.noise());
    EXPECT_NEAR(cf, b.x_minus().squaredNorm(), 1e-10 * cf) << n;
  }
  EXPECT_THROW(frobenius_closed_form(0.85, 5, MatrixXd::Zero(5, 100)), TooLarge);
}

TEST(Family, ParseAndBuild) {
  EXPECT_EQ(parse_family("jordan"), Family::Jordan);
  EXPECT_EQ(parse_family("swsscs"), Family::Jordan);
  EXPECT_EQ(parse_family("hermitian"), Family::Hermitian);
  EXPECT_EQ(parse_family("diagonal"), Family::Hermitian);
  EXPECT_THROW(parse_family("circulant"), BadParameter);
  EXPECT_EQ(to_string(Family::Hermitian), "hermitian");
  const auto h = family_spec(Family::Hermitian, 0.7, 3);
  EXPECT_TRUE(h.matrix().isApprox(0.7 * MatrixXd::Identity(3, 3)));
  EXPECT_NE(family_spec(Family::Jordan, 0.7, 3).jordan(), nullptr);
}

TEST(Slope, LeastSquares) {
  EXPECT_NEAR(ols_slope({1, 2, 3, 4}, {3, 5, 7, 9}), 2.0, 1e-14);
  EXPECT_NEAR(ols_slope({0, 1, 2}, {1, 1, 1}), 0.0, 1e-14);
}

TEST(Scaling, InputValidation) {
  EXPECT_THROW(scaling_study(Family::Jordan, 0.9, {4}, 100, 5, 1), InsufficientPoints);
  EXPECT_THROW(scaling_study(Family::Jordan, 0.9, {5, 4}, 100, 5, 1), BadParameter);
  EXPECT_THROW(scaling_study(Family::Jordan, 0.9, {4, 4}, 100, 5, 1), BadParameter);
  EXPECT_THROW(scaling_study(Family::Jordan, 0.9, {4, 5}, 100, 1, 1), BadParameter);
}

TEST(Scaling, WorkerCountDoesNotMatter) {
  const auto a = scaling_study(Family::Jordan, 0.9, {3, 5, 7}, 300, 8, 4, 1, 200);
  const auto b = scaling_study(Family::Jordan, 0.9, {3, 5, 7}, 300, 8, 4, 6, 200);
  ASSERT_EQ(a.points.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.points[i].ratios, b.points[i].ratios);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
}

TEST(Scaling, TrialsMatchDirectSimulation) {
  const auto s = scaling_study(Family::Jordan, 0.8, {2, 3}, 200, 3, 9, 1, 50);
  const auto b = simulate(family_spec(Family::Jordan, 0.8, 3), 200, 9, scaling_trial_index(3, 2));
  EXPECT_EQ(s.points[1].ratios[2], talagrand_ratio(b).ratio);
}

TEST(Scaling, JordanGrowsHermitianDoesNot) {
  const auto j = scaling_study(Family::Jordan, 0.95, {4, 6, 8, 10}, 1000, 10, 1, 4, 300);
  EXPECT_GT(j.slope, 0.5);
  EXPECT_TRUE(j.ci_excludes_zero());
  const auto h = scaling_study(Family::Hermitian, 0.9, {4, 6, 8, 10}, 1000, 10, 1, 4, 300);
  EXPECT_LT(std::abs(h.slope), 0.05);
  for (const auto& p : h.points) EXPECT_LT(p.q99, 11.0);
}
