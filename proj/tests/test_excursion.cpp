#include <cmath>

#include <gtest/gtest.h>

#include "levex/error.hpp"
#include "levex/excursion.hpp"
#include "support.hpp"

using namespace levex;

namespace {

FieldPath path_on(const GridSpec& grid, std::initializer_list<double> values) {
  FieldPath p;
  p.grid = grid;
  p.values = Eigen::VectorXd(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) p.values[i++] = v;
  return p;
}

const GridSpec kThree = GridSpec::build(Window::interval(0.0, 1.0), 0.5);
const GaussianMarginal kStd{};

}  // namespace

TEST(Levels, Validation) {
  EXPECT_NO_THROW(ExcursionLevels({-2, -1, 0, 1, 2}));
  EXPECT_THROW(ExcursionLevels({}), Error);
  EXPECT_THROW(ExcursionLevels({0, 0}), Error);
  EXPECT_THROW(ExcursionLevels({1, 0}), Error);
  EXPECT_THROW(ExcursionLevels({NAN}), Error);
}

TEST(Indicator, Examples) {
  const auto p = path_on(kThree, {0.2, 1.5, -0.3});
  EXPECT_EQ(excursion_indicator(p, 0.0), (std::vector<bool>{true, true, false}));
  EXPECT_EQ(excursion_indicator(p, -10.0), (std::vector<bool>{true, true, true}));
  EXPECT_EQ(excursion_indicator(p, 1.5), (std::vector<bool>{false, false, false}));
}

TEST(SymDiff, Examples) {
  const auto a = path_on(kThree, {0.2, 1.5, -0.3});
  const auto b = path_on(kThree, {0.2, -0.1, 0.4});
  EXPECT_DOUBLE_EQ(symmetric_difference_volume(a, b, 0.0), 1.0);
  EXPECT_EQ(symmetric_difference_volume(a, a, 0.0), 0.0);
  const auto neg = path_on(kThree, {-0.2, -1.5, 0.3});
  EXPECT_DOUBLE_EQ(symmetric_difference_volume(a, neg, 0.0), 3 * 0.5);

  const auto other = path_on(GridSpec::build(Window::interval(0.0, 2.0), 1.0), {0.2, 1.5, -0.3});
  try {
    symmetric_difference_volume(a, other, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(ErrorReport, Examples) {
  const auto a = path_on(kThree, {0.2, 1.5, -0.3});
  const ExcursionLevels five({-2, -1, 0, 1, 2});
  const auto same = error_report(a, a, five);
  EXPECT_EQ(same.per_level.size(), 5u);
  EXPECT_EQ(same.total, 0.0);

  const GridSpec one = GridSpec::build(Window::interval(0.0, 0.5), 0.5);
  const auto r = error_report(path_on(one, {1.0}), path_on(one, {-1.0}), ExcursionLevels({0.0}));
  EXPECT_DOUBLE_EQ(r.total, 0.5);

  const auto b = path_on(kThree, {0.2, -0.1, 0.4});
  const auto rep = error_report(a, b, five);
  double sum = 0;
  for (const auto& [u, v] : rep.per_level) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 3 * 0.5);
    sum += v;
  }
  EXPECT_DOUBLE_EQ(rep.total, sum);
}

TEST(ExpectedError, Examples) {
  EXPECT_NEAR(expected_error_decomposition(1.0, ExcursionLevels({-1, 0, 2}), kStd, 10.0), 0.0, 1e-10);
  EXPECT_NEAR(expected_error_decomposition(0.0, ExcursionLevels({0.0}), kStd, 1.0), 0.5, 1e-14);
  EXPECT_NEAR(expected_error_decomposition(0.6, ExcursionLevels({0.7}), kStd, 1.0),
              0.226669183827336288, 1e-12);
  EXPECT_THROW(expected_error_decomposition(0.5, ExcursionLevels({0.0}), kStd, 0.0), Error);
}

TEST(ExpectedError, ArgminMatchesTargetArgmax) {
  const GaussianMarginal m{0.5, 1.3};
  const std::vector<double> lv{-1.0, 0.2, 0.5, 2.0};
  const ExcursionLevels levels(lv);
  std::size_t argmin = 0, argmax = 0;
  double best_err = INFINITY, best_target = -INFINITY;
  for (std::size_t i = 0; i <= 100; ++i) {
    const double rho = -1.0 + 0.02 * static_cast<double>(i);
    const double err = expected_error_decomposition(rho, levels, m, 3.0);
    const double tgt = target_functional(lv, rho, m);
    if (err < best_err) best_err = err, argmin = i;
    if (tgt > best_target) best_target = tgt, argmax = i;
  }
  EXPECT_EQ(argmin, argmax);
  EXPECT_EQ(argmin, 100u);
}
