#pragma once

#include <map>
#include <vector>

#include "levex/simulate.hpp"
#include "levex/special_fn.hpp"

namespace levex {

/// Strictly increasing, finite excursion levels u_1 < ... < u_k.
class ExcursionLevels {
 public:
  explicit ExcursionLevels(std::vector<double> levels);

  const std::vector<double>& values() const { return levels_; }
  std::size_t size() const { return levels_.size(); }

 private:
  std::vector<double> levels_;
};

struct ExcursionErrorReport {
  std::map<double, double> per_level;  // level -> symmetric-difference volume
  double total = 0.0;
};

/// Number of positions where exactly one of the two value vectors exceeds level.
std::size_t count_disagreements(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                double level);

/// X(t) > level at every grid point.
std::vector<bool> excursion_indicator(const FieldPath& path, double level);

/// Riemann volume mesh^d * #{points where exactly one path exceeds level}.
/// Throws ErrorCode::GridMismatch unless both paths share the grid.
double symmetric_difference_volume(const FieldPath& a, const FieldPath& b, double level);

ExcursionErrorReport error_report(const FieldPath& truth, const FieldPath& predicted,
                                  const ExcursionLevels& levels);

/// Expected symmetric-difference volume for a predictor that matches the
/// marginal and has pointwise correlation rho with the field:
///   2 v(W) sum_j [sf(u_j) - P(X > u_j, Xhat > u_j)].
double expected_error_decomposition(double rho, const ExcursionLevels& levels,
                                    const GaussianMarginal& marginal, double window_volume);

}  // namespace levex
