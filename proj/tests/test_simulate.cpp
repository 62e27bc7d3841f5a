#include <cmath>

#include <gtest/gtest.h>

#include "levex/error.hpp"
#include "levex/rng.hpp"
#include "levex/simulate.hpp"
#include "support.hpp"

using namespace levex;

TEST(Rng, SplitMixReference) {
  // Published SplitMix64 outputs for state 0 advanced by the golden gamma.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
  EXPECT_EQ(replication_seed(42, 7), replication_seed(42, 7));
}

TEST(Rng, NormalStreamMoments) {
  NormalStream s(123);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  NormalStream u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Grid, BuildCountsAndOrder) {
  const auto g = GridSpec::build(Window::interval(0.0, 100.0), 0.1);
  EXPECT_EQ(g.size(), 1001u);
  EXPECT_EQ(GridSpec::build(Window::interval(0.0, 100.0), 10.0).size(), 11u);
  EXPECT_EQ(GridSpec::build(Window::interval(0.0, 100.0), 0.5).size(), 201u);
  EXPECT_EQ(GridSpec::build(Window::interval(0.0, 0.5), 1.0).size(), 1u);

  const auto g2 = GridSpec::build(Window({0.0, 0.0}, {1.0, 2.0}), 0.5);
  EXPECT_EQ(g2.size(), 15u);
  EXPECT_DOUBLE_EQ(g2.cell_volume(), 0.25);
  for (std::size_t i = 1; i < g2.size(); ++i) {
    auto a = g2.point(i - 1), b = g2.point(i);
    EXPECT_TRUE(a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]));
  }
  const double p[] = {0.5, 1.5};
  EXPECT_EQ(g2.index_of(p), std::optional<std::size_t>(5 + 3));
  const double off[] = {0.25, 1.5};
  EXPECT_FALSE(g2.index_of(off));
  EXPECT_THROW(GridSpec::build(Window::interval(0.1, 0.2), 1.0), Error);
}

TEST(Grid, FromPointsRoundTrip) {
  const auto g = GridSpec::build(Window({-1.0, 0.0}, {1.0, 1.0}), 0.25);
  const auto back = GridSpec::from_points(g.points());
  EXPECT_TRUE(back.same_as(g));
  EXPECT_DOUBLE_EQ(back.mesh(), 0.25);

  PointMatrix shuffled = g.points();
  shuffled.row(0).swap(shuffled.row(1));
  EXPECT_THROW(GridSpec::from_points(shuffled), Error);
  EXPECT_THROW(GridSpec::from_points(fixtures::points_1d({0.0, 1.0, 3.0})), Error);
  EXPECT_EQ(GridSpec::from_points(fixtures::points_1d({4.0})).mesh(), 1.0);
}

TEST(Simulate, SinglePoint) {
  const CovarianceModel m(CovarianceKind::Exponential, 4.0);
  const GridSpec g = GridSpec::build(Window::interval(0.0, 0.5), 1.0);
  const auto path = simulate_path(m, {1.5, 2.0}, g, 77);
  NormalStream z(77);
  EXPECT_NEAR(path.values[0], 1.5 + 2.0 * z(), 1e-15);
}

TEST(Simulate, Deterministic) {
  const CovarianceModel m(CovarianceKind::Gaussian, 1.0);
  const GridSpec g = GridSpec::build(Window::interval(0.0, 20.0), 0.5);
  const auto a = simulate_path(m, {}, g, 5);
  const auto b = simulate_path(m, {}, g, 5);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, simulate_path(m, {}, g, 6).values);
}

TEST(Simulate, RejectsBadInputs) {
  const CovarianceModel m(CovarianceKind::Exponential, 1.0);
  EXPECT_THROW(simulate_path(m, {0.0, 2.0}, GridSpec::build(Window::interval(0, 1), 0.5), 1), Error);
  EXPECT_THROW(GaussianSampler(m, 0.0, GridSpec::build(Window::interval(0, 30000), 1.0).points()),
               Error);
}

TEST(Simulate, MomentsOnSpreadGrid) {
  // Far-spread points: Sigma is essentially diagonal.
  const CovarianceModel m(CovarianceKind::Gaussian, 2.0);
  const GaussianMarginal marg{1.0, std::sqrt(2.0)};
  const GaussianSampler s(m, marg.mu, GridSpec::build(Window::interval(0.0, 90.0), 10.0).points());
  const int reps = 10000;
  const auto n = static_cast<double>(s.size());
  double sum = 0, sq = 0;
  for (int r = 0; r < reps; ++r) {
    const auto v = s.sample(replication_seed(3, r));
    sum += v.sum();
    sq += (v.array() - marg.mu).square().sum();
  }
  EXPECT_NEAR(sum / (reps * n), marg.mu, 4.0 * marg.sigma / std::sqrt(reps * n));
  EXPECT_NEAR(sq / (reps * n), 2.0, 0.2);
}

TEST(Simulate, MarginalPreservation) {
  const CovarianceModel m(CovarianceKind::Exponential, 1.0);
  const GaussianSampler s(m, 0.0, GridSpec::build(Window::interval(0.0, 9.0), 1.0).points());
  double sum = 0, sq = 0;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    const auto v = s.sample(replication_seed(8, r));
    sum += v.sum();
    sq += v.squaredNorm();
  }
  const double mean = sum / (reps * 10.0);
  EXPECT_NEAR(mean, 0.0, 0.1);
  const double var = sq / (reps * 10.0) - mean * mean;
  EXPECT_GE(var, 0.85);
  EXPECT_LE(var, 1.15);
}

TEST(Simulate, CovarianceReproduction) {
  const CovarianceModel m(CovarianceKind::Exponential, 1.0);
  const GaussianSampler s(m, 0.0, fixtures::points_1d({0.0, 0.5}));
  const int reps = 2000;
  std::vector<double> prod;
  for (int r = 0; r < reps; ++r) {
    const auto v = s.sample(replication_seed(21, r));
    prod.push_back(v[0] * v[1]);
  }
  double mean = 0;
  for (double p : prod) mean += p;
  mean /= reps;
  double var = 0;
  for (double p : prod) var += (p - mean) * (p - mean);
  const double se = std::sqrt(var / (reps - 1) / reps);
  EXPECT_NEAR(mean, std::exp(-0.5), 3 * se);
}

TEST(Restrict, Examples) {
  const CovarianceModel m(CovarianceKind::Exponential, 1.0);
  const auto path = simulate_path(m, {}, GridSpec::build(Window::interval(0.0, 2.0), 0.5), 3);
  const auto all = restrict_to_observations(path, path.grid.points());
  EXPECT_EQ(all.values(), path.values);
  const auto first = restrict_to_observations(path, fixtures::points_1d({0.0}));
  EXPECT_EQ(first.size(), 1u);
  EXPECT_EQ(first.values()[0], path.values[0]);
  try {
    restrict_to_observations(path, fixtures::points_1d({0.25}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}
