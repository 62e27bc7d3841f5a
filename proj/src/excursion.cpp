#include "levex/excursion.hpp"

#include <algorithm>
#include <cmath>

#include "levex/error.hpp"

namespace levex {

ExcursionLevels::ExcursionLevels(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) fail(ErrorCode::InvalidArgument, "at least one excursion level is required");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!std::isfinite(levels_[i])) fail(ErrorCode::InvalidArgument, "excursion levels must be finite");
    if (i > 0 && !(levels_[i] > levels_[i - 1])) {
      fail(ErrorCode::InvalidArgument, "excursion levels must increase strictly");
    }
  }
}

std::vector<bool> excursion_indicator(const FieldPath& path, double level) {
  std::vector<bool> above(static_cast<std::size_t>(path.values.size()));
  for (Eigen::Index i = 0; i < path.values.size(); ++i) {
    above[static_cast<std::size_t>(i)] = path.values[i] > level;
  }
  return above;
}

std::size_t count_disagreements(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                double level) {
  if (a.size() != b.size()) fail(ErrorCode::GridMismatch, "value vectors differ in length");
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((a[i] > level) != (b[i] > level)) ++count;
  }
  return count;
}

double symmetric_difference_volume(const FieldPath& a, const FieldPath& b, double level) {
  if (!a.grid.same_as(b.grid) || a.values.size() != b.values.size()) {
    fail(ErrorCode::GridMismatch, "paths are defined on different grids");
  }
  return a.grid.cell_volume() * static_cast<double>(count_disagreements(a.values, b.values, level));
}

ExcursionErrorReport error_report(const FieldPath& truth, const FieldPath& predicted,
                                  const ExcursionLevels& levels) {
  ExcursionErrorReport report;
  for (double u : levels.values()) {
    const double v = symmetric_difference_volume(truth, predicted, u);
    report.per_level[u] = v;
    report.total += v;
  }
  return report;
}

double expected_error_decomposition(double rho, const ExcursionLevels& levels,
                                    const GaussianMarginal& marginal, double window_volume) {
  if (!std::isfinite(window_volume) || window_volume <= 0.0) {
    fail(ErrorCode::InvalidArgument, "window volume must be positive");
  }
  double sum = 0.0;
  for (double u : levels.values()) {
    sum += normal_sf(u, marginal) - joint_exceedance(u, rho, marginal);
  }
  return std::max(0.0, 2.0 * window_volume * sum);
}

}  // namespace levex
