#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "levex/covariance.hpp"
#include "levex/error.hpp"

using namespace levex;

namespace {

PointMatrix points_1d(std::initializer_list<double> xs) {
  PointMatrix p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

ObservationSet obs_1d(std::initializer_list<double> xs) {
  return ObservationSet(points_1d(xs), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xs.size())));
}

const CovarianceKind kBuiltin[] = {CovarianceKind::Exponential, CovarianceKind::Gaussian,
                                   CovarianceKind::BesselJ0, CovarianceKind::Sinc};

}  // namespace

TEST(Covariance, Examples) {
  const double zero[] = {0.0};
  const double one[] = {1.0};
  EXPECT_EQ(CovarianceModel(CovarianceKind::Exponential, 1.0)(zero), 1.0);
  EXPECT_EQ(CovarianceModel(CovarianceKind::Sinc, 1.0)(zero), 1.0);
  EXPECT_NEAR(CovarianceModel(CovarianceKind::Gaussian, 1.0)(one), 0.606530659712633424, 1e-16);
  EXPECT_NEAR(CovarianceModel(CovarianceKind::BesselJ0, 2.0)(one), 2 * 0.765197686557966551, 1e-15);
  EXPECT_NEAR(CovarianceModel(CovarianceKind::Sinc, 1.0)(one), std::sin(1.0), 1e-16);
  EXPECT_NEAR(CovarianceModel(CovarianceKind::Exponential, 3.0, 2.0).at_distance(1.0),
              3.0 * std::exp(-0.5), 1e-15);
}

TEST(Covariance, SincNearZeroIsSmooth) {
  const CovarianceModel sinc(CovarianceKind::Sinc, 1.0);
  for (double r : {1e-12, 1e-9, 3e-8, 1e-7, 1e-5}) {
    EXPECT_NEAR(sinc.at_distance(r), 1.0 - r * r / 6.0, 1e-15) << r;
  }
}

TEST(Covariance, InvalidParameters) {
  EXPECT_THROW(CovarianceModel(CovarianceKind::Exponential, 0.0), Error);
  EXPECT_THROW(CovarianceModel(CovarianceKind::Exponential, 1.0, -1.0), Error);
  EXPECT_THROW(covariance_kind_from_string("matern"), Error);
  EXPECT_EQ(covariance_kind_from_string("bessel_j0"), CovarianceKind::BesselJ0);
  const double bad[] = {std::nan("")};
  EXPECT_THROW(CovarianceModel(CovarianceKind::Gaussian, 1.0)(bad), Error);
}

TEST(Covariance, EvenBoundedAndIsotropic) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 3.0);
  for (auto kind : kBuiltin) {
    const CovarianceModel m(kind, 1.7);
    for (int i = 0; i < 200; ++i) {
      const double lag[] = {g(rng), g(rng), g(rng)};
      const double neg[] = {-lag[0], -lag[1], -lag[2]};
      EXPECT_EQ(m(lag), m(neg));
      EXPECT_LE(std::abs(m(lag)), m.sigma2() + 1e-15);
      // Random rotation in the (x, y) plane and a coordinate permutation.
      const double a = g(rng);
      const double rot[] = {std::cos(a) * lag[0] - std::sin(a) * lag[1],
                            std::sin(a) * lag[0] + std::cos(a) * lag[1], lag[2]};
      const double perm[] = {lag[2], lag[0], lag[1]};
      EXPECT_NEAR(m(rot), m(lag), 1e-12);
      EXPECT_NEAR(m(perm), m(lag), 1e-12);
      const double two[] = {lag[0], lag[1]};
      const double r2 = std::hypot(lag[0], lag[1]);
      const double axis[] = {r2, 0.0};
      EXPECT_NEAR(m(two), m(axis), 1e-12);
    }
  }
}

TEST(Covariance, HolderDefaults) {
  const CovarianceModel e(CovarianceKind::Exponential, 2.0, 4.0);
  EXPECT_DOUBLE_EQ(e.holder_k(), 0.5);
  EXPECT_DOUBLE_EQ(e.holder_alpha(), 1.0);
  const CovarianceModel g(CovarianceKind::Gaussian, 1.0);
  EXPECT_DOUBLE_EQ(g.holder_k(), 1.0);
  EXPECT_DOUBLE_EQ(g.holder_alpha(), 2.0);
  // The default constants really bound |C(0) - C(h)|.
  for (auto kind : kBuiltin) {
    const CovarianceModel m(kind, 1.3, 0.7);
    for (double h = 1e-4; h < 10.0; h *= 1.3) {
      EXPECT_LE(std::abs(m.sigma2() - m.at_distance(h)),
                m.holder_k() * std::pow(h, m.holder_alpha()) * (1 + 1e-12) + 1e-15)
          << to_string(kind) << " " << h;
    }
  }
}

TEST(Covariance, UserTable) {
  auto m = CovarianceModel::from_table({{0.0, 2.0}, {1.0, 1.0}, {3.0, 0.0}});
  EXPECT_EQ(m.sigma2(), 2.0);
  EXPECT_DOUBLE_EQ(m.at_distance(0.5), 1.5);
  EXPECT_DOUBLE_EQ(m.at_distance(2.0), 0.5);
  EXPECT_DOUBLE_EQ(m.at_distance(10.0), 0.0);
  const double lag[] = {-0.5};
  EXPECT_DOUBLE_EQ(m(lag), 1.5);
  EXPECT_DOUBLE_EQ(m.holder_k(), 1.0);
  EXPECT_THROW(CovarianceModel::from_table({{0.5, 1.0}, {1.0, 0.5}}), Error);
  EXPECT_THROW(CovarianceModel::from_table({{0.0, 1.0}, {0.0, 0.5}}), Error);
  EXPECT_THROW(CovarianceModel::from_table({}), Error);
}

TEST(Window, Basics) {
  const Window w({0.0, -1.0}, {2.0, 1.0});
  EXPECT_DOUBLE_EQ(w.volume(), 4.0);
  const double in[] = {1.0, 0.0};
  const double out[] = {2.5, 0.0};
  EXPECT_TRUE(w.contains(in));
  EXPECT_FALSE(w.contains(out));
  EXPECT_THROW(Window({0.0}, {0.0}), Error);
  EXPECT_THROW(Window({0.0}, {1.0, 2.0}), Error);
}

TEST(Observations, DuplicatesRejected) {
  try {
    obs_1d({0.0, 1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateLocation);
  }
  PointMatrix p(2, 2);
  p << 0, 1, 0, 1;
  EXPECT_THROW(ObservationSet(p, Eigen::VectorXd::Zero(2)), Error);
  p << 0, 1, 1, 0;
  EXPECT_NO_THROW(ObservationSet(p, Eigen::VectorXd::Zero(2)));
}

TEST(Observations, NearestTieGoesToLowestIndex) {
  const auto obs = obs_1d({4.0, 0.0, 2.0});
  const double t[] = {1.0};
  EXPECT_EQ(obs.nearest(t), 1u);
  const double t2[] = {3.0};
  EXPECT_EQ(obs.nearest(t2), 0u);
  EXPECT_THROW(obs.check_inside(Window::interval(0.0, 3.0)), Error);
  EXPECT_NO_THROW(obs.check_inside(Window::interval(0.0, 4.0)));
}

TEST(BuildSigma, Examples) {
  const CovarianceModel e(CovarianceKind::Exponential, 1.0);
  const auto sys = build_sigma(e, obs_1d({0.0, std::log(2.0)}));
  EXPECT_NEAR(sys.sigma()(0, 1), 0.5, 1e-15);
  EXPECT_EQ(sys.sigma()(0, 0), 1.0);
  EXPECT_EQ(sys.ridge(), 0.0);

  const CovarianceModel b(CovarianceKind::BesselJ0, 2.25);
  const auto one = build_sigma(b, obs_1d({3.0}));
  EXPECT_EQ(one.sigma()(0, 0), 2.25);
  EXPECT_NEAR(one.chol()(0, 0), 1.5, 1e-15);

  const CovarianceModel g(CovarianceKind::Gaussian, 1.0);
  const auto far = build_sigma(g, obs_1d({0.0, 10.0, 20.0}));
  EXPECT_LT((far.sigma() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-20);
}

TEST(BuildSigma, RidgeForNearSingular) {
  // Very fine Gaussian design: numerically rank deficient without a ridge.
  PointMatrix p(40, 1);
  for (int i = 0; i < 40; ++i) p(i, 0) = 0.01 * i;
  const CovarianceModel g(CovarianceKind::Gaussian, 1.0);
  const auto sys = build_sigma(g, ObservationSet(p, Eigen::VectorXd::Zero(40)));
  EXPECT_GT(sys.ridge(), 0.0);
  EXPECT_LE(sys.ridge(), 1e-6);
}

TEST(BuildSigma, SingularAfterMaxRidgeFails) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;  // indefinite
  try {
    CovarianceSystem::factorize(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Numerical);
    EXPECT_NE(std::string(e.what()).find("numerically singular"), std::string::npos);
  }
}

TEST(BuildCt, Examples) {
  const CovarianceModel e(CovarianceKind::Exponential, 1.0);
  const auto obs = obs_1d({0.0, 2.0});
  const double t[] = {1.0};
  const auto ct = build_ct(e, obs, t);
  EXPECT_NEAR(ct[0], std::exp(-1.0), 1e-16);
  EXPECT_NEAR(ct[1], std::exp(-1.0), 1e-16);

  const auto sys = build_sigma(e, obs);
  const double t1[] = {0.0};
  EXPECT_EQ(build_ct(e, obs, t1), sys.sigma().col(0));

  const CovarianceModel g(CovarianceKind::Gaussian, 1.0);
  const double tf[] = {17.0};
  EXPECT_LT(build_ct(g, obs, tf).cwiseAbs().maxCoeff(), 1e-30);
  const double wrong_dim[] = {1.0, 2.0};
  EXPECT_THROW(build_ct(e, obs, wrong_dim), Error);
}
