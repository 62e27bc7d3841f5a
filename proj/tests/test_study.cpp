#include <cmath>

#include <gtest/gtest.h>

#include "levex/error.hpp"
#include "levex/study.hpp"
#include "support.hpp"

using namespace levex;

namespace {

StudyConfig small_config(CovarianceKind kind = CovarianceKind::Exponential) {
  return StudyConfig{
      .model = CovarianceModel(kind, 1.0),
      .marginal = {},
      .window = Window::interval(0.0, 20.0),
      .obs_mesh = 4.0,
      .eval_mesh = 0.5,
      .levels = ExcursionLevels({-1.0, 0.0, 1.0}),
      .methods = {std::begin(kAllMethods), std::end(kAllMethods)},
      .replications = 12,
      .master_seed = 99,
      .threads = 1,
  };
}

}  // namespace

TEST(Summary, Examples) {
  const double one[] = {2.5};
  const auto s = summarize(one);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_EQ(s.q1, 2.5);
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.q3, 2.5);
  EXPECT_EQ(s.min, 2.5);
  EXPECT_EQ(s.max, 2.5);

  const double four[] = {4, 1, 3, 2};
  const auto f = summarize(four);
  EXPECT_DOUBLE_EQ(f.median, 2.5);
  EXPECT_DOUBLE_EQ(f.q1, 1.75);
  EXPECT_DOUBLE_EQ(f.q3, 3.25);
  EXPECT_DOUBLE_EQ(f.mean, f.median);
  EXPECT_THROW(summarize(std::span<const double>{}), Error);

  EXPECT_DOUBLE_EQ(sample_variance(Eigen::Vector3d(1, 2, 3)), 1.0);
  EXPECT_EQ(sample_variance(Eigen::VectorXd::Constant(1, 4.0)), 0.0);
}

TEST(Study, ShapeAndExactness) {
  auto cfg = small_config();
  const auto r = run_study(cfg);
  EXPECT_EQ(r.raw.size(), 12u * 4 * 3);
  EXPECT_EQ(r.summaries.size(), 4u * 3);
  EXPECT_EQ(r.variances.size(), 12u * 5);
  EXPECT_EQ(r.eval_grid.size(), 41u);
  EXPECT_LT(r.exactness_max_deviation, 1e-8);
  for (const auto& [m, curve] : r.mse_curve) {
    EXPECT_EQ(curve.size(), 41);
    EXPECT_NEAR(curve[0], 0.0, 1e-10);  // t = 0 is observed
    EXPECT_GE(curve.minCoeff(), 0.0);
  }
  for (std::size_t i = 0; i < r.raw.size(); ++i) {
    EXPECT_EQ(r.raw[i].replication, i / 12);
  }
}

TEST(Study, SingleReplicationOnObservationGridIsExact) {
  auto cfg = small_config();
  cfg.eval_mesh = cfg.obs_mesh;
  cfg.replications = 1;
  cfg.methods = {Method::LevelsetUnknownMean};
  for (const auto& rec : run_study(cfg).raw) EXPECT_EQ(rec.sym_diff, 0.0);
}

TEST(Study, DeterministicAcrossThreadCounts) {
  auto cfg = small_config(CovarianceKind::Gaussian);
  const auto a = run_study(cfg);
  cfg.threads = 4;
  const auto b = run_study(cfg);
  ASSERT_EQ(a.raw.size(), b.raw.size());
  for (std::size_t i = 0; i < a.raw.size(); ++i) {
    EXPECT_EQ(a.raw[i].sym_diff, b.raw[i].sym_diff);
    EXPECT_EQ(a.raw[i].method, b.raw[i].method);
  }
  for (std::size_t i = 0; i < a.variances.size(); ++i) {
    EXPECT_EQ(a.variances[i].var_hat, b.variances[i].var_hat);
  }
}

TEST(Study, Validation) {
  auto cfg = small_config();
  cfg.eval_mesh = 8.0;
  EXPECT_THROW(run_study(cfg), Error);
  cfg = small_config();
  cfg.marginal.sigma = 2.0;
  EXPECT_THROW(run_study(cfg), Error);
  cfg = small_config();
  cfg.obs_mesh = 3.3;  // not on the 0.5 lattice
  EXPECT_THROW(run_study(cfg), Error);
}

TEST(Study, LevelSymmetryForZeroMean) {
  auto cfg = small_config();
  cfg.replications = 150;
  cfg.methods = {Method::LevelsetKnownMean};
  cfg.threads = 0;
  const auto r = run_study(cfg);
  std::vector<double> lo, hi;
  for (const auto& rec : r.raw) {
    if (rec.level == -1.0) lo.push_back(rec.sym_diff);
    if (rec.level == 1.0) hi.push_back(rec.sym_diff);
  }
  double diff_mean = 0, diff_sq = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double d = lo[i] - hi[i];
    diff_mean += d;
    diff_sq += d * d;
  }
  const double n = static_cast<double>(lo.size());
  diff_mean /= n;
  const double se = std::sqrt((diff_sq / n - diff_mean * diff_mean) / (n - 1));
  EXPECT_LE(std::abs(diff_mean), 3 * se + 1e-12);
}

TEST(PredictGrid, ExactAtObservationsAndMethodMajor) {
  const CovarianceModel m(CovarianceKind::Exponential, 1.0);
  const ObservationSet obs(fixtures::points_1d({0.0, 10.0, 20.0}), Eigen::Vector3d(0.5, -0.3, 1.2));
  const auto grid = GridSpec::build(Window::interval(0.0, 20.0), 5.0);
  const std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  const auto t = predict_grid(m, {}, obs, grid, methods);
  ASSERT_EQ(t.rows.size(), 4u * 5);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    EXPECT_EQ(t.rows[k].method, methods[k / 5]);
    EXPECT_EQ(t.rows[k].point, k % 5);
    if (k % 5 % 2 == 0) {
      EXPECT_NEAR(t.rows[k].prediction, obs.values()[static_cast<Eigen::Index>(k % 5 / 2)], 1e-12);
      EXPECT_NEAR(t.rows[k].mse, 0.0, 1e-12);
    }
  }
}

TEST(PredictGrid, SingleObservationUnknownMeanIsConstant) {
  const CovarianceModel m(CovarianceKind::Gaussian, 1.0);
  const ObservationSet obs(fixtures::points_1d({3.0}), Eigen::VectorXd::Constant(1, -0.8));
  const auto grid = GridSpec::build(Window::interval(0.0, 10.0), 1.0);
  const auto t = predict_grid(m, {}, obs, grid, {Method::LevelsetUnknownMean});
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.prediction, -0.8);
    EXPECT_EQ(row.degeneracy, Degeneracy::SingleObservation);
  }
}

TEST(Consistency, ExponentialAndGaussianBounds) {
  const double t[] = {50.3};
  const double meshes[] = {10, 5, 2.5, 1.25, 0.625};
  for (auto kind : {CovarianceKind::Exponential, CovarianceKind::Gaussian}) {
    const CovarianceModel m(kind, 1.0);
    const auto r = consistency_experiment(m, {}, Window::interval(0.0, 100.0), t, meshes, 4, 50);
    EXPECT_EQ(r.method, Method::LevelsetKnownMean);
    EXPECT_TRUE(r.warnings.empty());
    ASSERT_EQ(r.points.size(), 5u);
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      EXPECT_LE(p.analytical_mse, p.holder_bound + 1e-9);
      EXPECT_LE(p.analytical_mse, p.distance_bound + 1e-9);
      if (i > 0) EXPECT_LE(p.analytical_mse, r.points[i - 1].analytical_mse + 1e-9);
    }
  }
}

TEST(Consistency, ObservedPointHasZeroError) {
  const double t[] = {2.5};
  const double meshes[] = {10, 5, 2.5};
  const CovarianceModel m(CovarianceKind::Exponential, 1.0);
  const auto r = consistency_experiment(m, {1.0, 1.0}, Window::interval(0.0, 20.0), t, meshes, 1, 20);
  EXPECT_EQ(r.method, Method::LevelsetUnknownMean);
  EXPECT_NEAR(r.points[2].analytical_mse, 0.0, 1e-10);
  EXPECT_EQ(r.points[2].empirical_mse, 0.0);
  const double on_grid[] = {10.0};
  EXPECT_THROW(consistency_experiment(m, {}, Window::interval(0.0, 20.0), on_grid, meshes, 1, 5), Error);
  const double increasing[] = {2.5, 5, 10};
  const double t2[] = {1.1};
  EXPECT_FALSE(
      consistency_experiment(m, {}, Window::interval(0.0, 20.0), t2, increasing, 1, 0).warnings.empty());
}
