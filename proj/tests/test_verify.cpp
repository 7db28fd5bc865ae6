#include <gtest/gtest.h>

#include <filesystem>

#include "ldslab/errors.hpp"
#include "ldslab/io.hpp"
#include "ldslab/verify.hpp"

using namespace ldslab;
namespace fs = std::filesystem;

TEST(Verify, EverySuitePasses) {
  const auto report = run_verify({});
  EXPECT_EQ(report.suites.size(), suite_names().size());
  for (const auto& s : report.suites) {
    EXPECT_TRUE(s.passed()) << s.name << ": " << (s.failures.empty() ? "" : s.failures[0]);
    EXPECT_GT(s.checks, 0) << s.name;
  }
}

TEST(Verify, ReportIndependentOfWorkers) {
  VerifyOptions one;
  one.suites = {"neg2mom", "precision", "moments"};
  VerifyOptions many = one;
  many.workers = 6;
  EXPECT_EQ(run_verify(one).to_json(), run_verify(many).to_json());
}

TEST(Verify, UnknownSuite) {
  VerifyOptions o;
  o.suites = {"nope"};
  EXPECT_THROW(run_verify(o), BadParameter);
}

TEST(Verify, ExternalBundle) {
  const auto dir = fs::temp_directory_path() / "ldslab_verify_bundle";
  fs::remove_all(dir);
  const auto b = simulate(make_spec(JordanBlock{0.7, 3}), 100, 4);
  save_bundle(b, dir);
  VerifyOptions o;
  o.bundle = dir;
  const auto good = run_verify(o);
  ASSERT_EQ(good.suites.size(), 1u);
  EXPECT_TRUE(good.ok());

  MatrixXd xp = b.x_plus();
  xp(0, 10) += 0.5;
  save_bundle(DataBundle(b.spec(), b.x_minus(), xp, b.noise(), 4), dir);
  const auto bad = run_verify(o);
  EXPECT_FALSE(bad.ok());
  ASSERT_FALSE(bad.failures().empty());
  EXPECT_EQ(bad.failures()[0].rfind("bundle: bundle invariant violated (transition", 0), 0u);
}

TEST(RandomInstance, ShapesAndRank) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto x = random_instance(1, k);
    EXPECT_GE(x.rows(), 2);
    EXPECT_LE(x.rows(), 10);
    EXPECT_GT(x.cols(), x.rows());
    EXPECT_LE(x.cols(), 100);
    EXPECT_EQ(random_instance(1, k), x);
  }
  const auto u = random_orthogonal(5, 2, 3);
  EXPECT_TRUE((u.transpose() * u).isApprox(MatrixXd::Identity(5, 5), 1e-13));
}
