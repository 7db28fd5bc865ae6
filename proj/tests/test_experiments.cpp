#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "ldslab/errors.hpp"
#include "ldslab/experiments.hpp"

using namespace ldslab;
namespace fs = std::filesystem;

TEST(Config, ApplyAcceptsBothSpellings) {
  ExperimentConfig c;
  c.apply({{"lambda", "0.7"}, {"n-list", "3,4"}, {"N_list", "100, 200"}, {"max-cells", "9"},
           {"plot", "true"}, {"seed", "12"}});
  EXPECT_EQ(c.lambda, 0.7);
  EXPECT_EQ(c.n_list, (std::vector<int>{3, 4}));
  EXPECT_EQ(c.N_list, (std::vector<int>{100, 200}));
  EXPECT_EQ(c.max_cells, 9);
  EXPECT_TRUE(c.plot);
  EXPECT_EQ(c.seed, 12u);
  EXPECT_THROW(c.apply({{"lamda", "0.7"}}), BadParameter);
}

TEST(Config, ListParsing) {
  EXPECT_EQ(parse_int_list("1,2, 3"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(parse_double_list("0.5,-0.25"), (std::vector<double>{0.5, -0.25}));
  EXPECT_THROW(parse_int_list("1,x"), BadParameter);
}

TEST(Config, Validation) {
  ExperimentConfig c;
  c.lambda = 1.2;
  EXPECT_THROW(validate_common(c), BadParameter);
  c.lambda = -0.5;  // not a valid Jordan eigenvalue
  EXPECT_THROW(validate_common(c), BadParameter);
  c.family = "hermitian";
  EXPECT_NO_THROW(validate_common(c));
  c.n = 4;
  c.N = 4;
  EXPECT_THROW(validate_common(c), BadParameter);
  c.N = 9000;
  EXPECT_THROW(validate_common(c), BadParameter);
  c.N = 100;
  c.trials = 51;
  EXPECT_THROW(validate_common(c), BadParameter);
  c.trials = 5;
  c.eigs = {0.1, 0.2};
  EXPECT_THROW(validate_common(c), BadParameter);
}

TEST(Prefix, EqualsShorterSimulation) {
  const auto spec = make_spec(JordanBlock{0.9, 4});
  const auto full = simulate(spec, 400, 3, 1);
  const auto cut = prefix(full, 150);
  const auto direct = simulate(spec, 150, 3, 1);
  EXPECT_EQ(cut.x_minus(), direct.x_minus());
  EXPECT_EQ(cut.x_plus(), direct.x_plus());
  EXPECT_EQ(cut.noise(), direct.noise());
}

TEST(Evaluate, BundleMetrics) {
  const auto b = simulate(make_spec(JordanBlock{0.6, 3}), 300, 2);
  const auto m = evaluate_bundle(b);
  EXPECT_TRUE(m.bounds_valid);
  EXPECT_NEAR(m.error, m.noise_error, 1e-8);
  EXPECT_GE(m.sigma_max, m.sigma_min);
  EXPECT_NEAR(m.kappa, m.sigma_max / m.sigma_min, 1e-8 * m.kappa);
  EXPECT_TRUE(std::isfinite(m.swsscs_lower));
  const auto h = evaluate_bundle(simulate(make_spec(HermitianDiagonal{{0.3, 0.2}}), 50, 2));
  EXPECT_TRUE(std::isnan(h.swsscs_lower));
}

TEST(Figures, UnknownName) {
  EXPECT_THROW(run_figure("nope", ExperimentConfig{}), UnknownFigure);
  EXPECT_EQ(figure_names().size(), 6u);
}

TEST(Figures, SmallRunsProduceCurves) {
  ExperimentConfig c;
  c.trials = 3;
  c.N = 200;
  c.n_list = {3, 4};
  c.workers = 2;
  for (const std::string name : {"row-curse", "row-no-curse", "sigma1-tracks-row", "talagrand-growth"}) {
    const auto fig = run_figure(name, c);
    ASSERT_EQ(fig.curves.size(), 2u) << name;
    for (const auto& curve : fig.curves) {
      EXPECT_FALSE(curve.x.empty());
      EXPECT_EQ(curve.x.size(), curve.median.size());
      for (std::size_t i = 0; i < curve.x.size(); ++i) {
        EXPECT_LE(curve.q25[i], curve.median[i]);
        EXPECT_LE(curve.median[i], curve.q75[i]);
      }
    }
  }
}

TEST(Figures, WorkerIndependent) {
  ExperimentConfig c;
  c.trials = 4;
  c.n = 4;
  c.lambda = 0.8;
  c.N_list = {100, 200};
  c.workers = 1;
  const auto a = run_figure("ols-transience", c);
  c.workers = 4;
  const auto b = run_figure("ols-transience", c);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.curves.size(), 3u);
}

TEST(Figures, WriteCsvAndSvg) {
  ExperimentConfig c;
  c.trials = 3;
  c.n = 3;
  c.lambda = 0.7;
  c.N_list = {100, 200};
  const auto fig = run_figure("error-sandwich", c);
  const auto dir = fs::temp_directory_path() / "ldslab_fig";
  fs::remove_all(dir);
  const auto paths = write_figure(fig, dir, true);
  EXPECT_EQ(paths.size(), fig.curves.size() + 1);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
  EXPECT_TRUE(fs::exists(dir / "error-sandwich.svg"));
  const auto first = read_text(paths.front());
  EXPECT_EQ(first.rfind("x,median,q25,q75\n", 0), 0u);
}

TEST(Sweep, GridCap) {
  ExperimentConfig c;
  c.n_list = {2, 3, 4};
  c.N_list = {100, 200};
  c.lambda_list = {0.3, 0.5};
  c.max_cells = 4;
  try {
    run_sweep(c);
    FAIL();
  } catch (const GridTooLarge& e) {
    EXPECT_NE(std::string(e.what()).find("12 cells, cap is 4"), std::string::npos);
  }
}

TEST(Sweep, CellMatchesDirectEvaluation) {
  ExperimentConfig c;
  c.family = "hermitian";
  c.lambda_list = {0.2, 0.6};
  c.n = 3;
  c.N = 150;
  c.trials = 1;
  c.seed = 5;
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 2u);
  const auto m = evaluate_bundle(simulate(family_spec(Family::Hermitian, 0.6, 3), 150, 5, 0));
  EXPECT_EQ(rows[1].median.error, m.error);
  EXPECT_EQ(rows[1].family, "hermitian");
  const auto line = sweep_row_csv(rows[1]);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','),
            std::count(kSweepHeader, kSweepHeader + std::strlen(kSweepHeader), ','));
}
