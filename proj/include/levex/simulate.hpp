#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "levex/covariance.hpp"
#include "levex/special_fn.hpp"

namespace levex {

inline constexpr std::size_t kMaxSimulationPoints = 20000;

/// Regular lattice (h Z)^d intersected with a window. Points are listed in
/// lexicographic order, first axis slowest.
class GridSpec {
 public:
  GridSpec() = default;

  static GridSpec build(const Window& window, double mesh);

  /// Reconstructs a lattice from explicit, lexicographically sorted points
  /// (e.g. read back from CSV). A single point gets mesh 1.
  static GridSpec from_points(PointMatrix points);

  const Window& window() const { return window_; }
  double mesh() const { return mesh_; }
  const PointMatrix& points() const { return points_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  std::span<const double> point(std::size_t i) const;

  /// Volume element mesh^d carried by every grid point.
  double cell_volume() const;

  std::optional<std::size_t> index_of(std::span<const double> x) const;

  bool same_as(const GridSpec& other) const;

 private:
  Window window_;
  double mesh_ = 1.0;
  std::vector<double> origin_;
  std::vector<std::size_t> counts_;
  PointMatrix points_;
};

struct FieldPath {
  GridSpec grid;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  GaussianMarginal marginal;
};

/// Exact sampler mean + L z at a fixed point set, L L' = Sigma (+ ridge).
class GaussianSampler {
 public:
  GaussianSampler(const CovarianceModel& model, double mean, const PointMatrix& points);

  Eigen::VectorXd sample(std::uint64_t seed) const;
  double ridge() const { return ridge_; }
  std::size_t size() const { return static_cast<std::size_t>(factor_.rows()); }

 private:
  double mean_;
  double ridge_ = 0.0;
  Eigen::MatrixXd factor_;
};

/// Throws ErrorCode::InvalidArgument when the grid exceeds
/// kMaxSimulationPoints or marginal.sigma^2 disagrees with model.sigma2().
FieldPath simulate_path(const CovarianceModel& model, const GaussianMarginal& marginal,
                        const GridSpec& grid, std::uint64_t seed);

/// Copies path values at the given grid locations (rows). Locations that are
/// not grid points throw ErrorCode::GridMismatch.
ObservationSet restrict_to_observations(const FieldPath& path,
                                        const PointMatrix& obs_locations);

void check_marginal_matches(const CovarianceModel& model, const GaussianMarginal& marginal);

}  // namespace levex
