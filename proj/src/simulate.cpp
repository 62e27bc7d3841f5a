#include "levex/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levex/error.hpp"
#include "levex/rng.hpp"

namespace levex {
namespace {

constexpr double kLatticeTolerance = 1e-9;

double coordinate_tolerance(double mesh) { return kLatticeTolerance * std::max(1.0, mesh); }

}  // namespace

GridSpec GridSpec::build(const Window& window, double mesh) {
  if (!std::isfinite(mesh) || mesh <= 0.0) {
    fail(ErrorCode::InvalidArgument, "mesh must be positive");
  }
  GridSpec grid;
  grid.window_ = window;
  grid.mesh_ = mesh;
  const std::size_t d = window.dim();
  std::vector<long long> first(d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    const auto lo = static_cast<long long>(std::ceil(window.lo[i] / mesh - kLatticeTolerance));
    const auto hi = static_cast<long long>(std::floor(window.hi[i] / mesh + kLatticeTolerance));
    if (hi < lo) fail(ErrorCode::InvalidArgument, "mesh leaves no grid point in the window");
    first[i] = lo;
    grid.origin_.push_back(static_cast<double>(lo) * mesh);
    grid.counts_.push_back(static_cast<std::size_t>(hi - lo + 1));
    total *= grid.counts_.back();
    if (total > 100'000'000) fail(ErrorCode::InvalidArgument, "grid too large");
  }

  grid.points_.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t i = 0; i < d; ++i) {
      grid.points_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          static_cast<double>(first[i] + static_cast<long long>(idx[i])) * mesh;
    }
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < grid.counts_[i]) break;
      idx[i] = 0;
    }
  }
  return grid;
}

GridSpec GridSpec::from_points(PointMatrix points) {
  if (points.rows() == 0 || points.cols() == 0) {
    fail(ErrorCode::InvalidArgument, "grid needs at least one point");
  }
  const auto d = static_cast<std::size_t>(points.cols());
  std::vector<std::vector<double>> axes(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto col = points.col(static_cast<Eigen::Index>(i));
    std::vector<double> values(col.begin(), col.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    axes[i] = std::move(values);
  }
  double mesh = 0.0;
  for (const auto& axis : axes) {
    for (std::size_t k = 1; k < axis.size(); ++k) {
      const double gap = axis[k] - axis[k - 1];
      if (mesh == 0.0 || gap < mesh) mesh = gap;
    }
  }
  if (mesh == 0.0) mesh = 1.0;

  GridSpec grid;
  grid.mesh_ = mesh;
  std::vector<double> lo(d), hi(d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& axis = axes[i];
    const double span = axis.back() - axis.front();
    const double steps = span / mesh;
    if (std::abs(steps - std::round(steps)) > 1e-6 ||
        static_cast<std::size_t>(std::llround(steps)) + 1 != axis.size()) {
      fail(ErrorCode::GridMismatch, "points do not form a regular lattice");
    }
    grid.origin_.push_back(axis.front());
    grid.counts_.push_back(axis.size());
    total *= axis.size();
    lo[i] = axis.front();
    hi[i] = axis.back();
    if (!(lo[i] < hi[i])) {
      lo[i] -= 0.5 * mesh;
      hi[i] += 0.5 * mesh;
    }
  }
  if (total != static_cast<std::size_t>(points.rows())) {
    fail(ErrorCode::GridMismatch, "points do not cover a full lattice");
  }
  grid.window_ = Window(lo, hi);
  grid.points_ = std::move(points);
  for (std::size_t p = 0; p < total; ++p) {
    auto found = grid.index_of(grid.point(p));
    if (!found || *found != p) {
      fail(ErrorCode::GridMismatch, "lattice points must be listed in lexicographic order");
    }
  }
  return grid;
}

std::span<const double> GridSpec::point(std::size_t i) const {
  return row_span(points_, static_cast<Eigen::Index>(i));
}

double GridSpec::cell_volume() const {
  return std::pow(mesh_, static_cast<double>(dim()));
}

std::optional<std::size_t> GridSpec::index_of(std::span<const double> x) const {
  if (x.size() != dim()) return std::nullopt;
  const double tol = coordinate_tolerance(mesh_);
  std::size_t linear = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double steps = std::round((x[i] - origin_[i]) / mesh_);
    if (steps < 0.0 || steps >= static_cast<double>(counts_[i])) return std::nullopt;
    const auto k = static_cast<std::size_t>(steps);
    const double coord =
        points_(0, static_cast<Eigen::Index>(i)) + static_cast<double>(k) * mesh_;
    if (std::abs(coord - x[i]) > tol) return std::nullopt;
    linear = linear * counts_[i] + k;
  }
  auto stored = point(linear);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(stored[i] - x[i]) > tol) return std::nullopt;
  }
  return linear;
}

bool GridSpec::same_as(const GridSpec& other) const {
  if (dim() != other.dim() || size() != other.size()) return false;
  const double tol = coordinate_tolerance(std::max(mesh_, other.mesh_));
  return ((points_ - other.points_).array().abs() <= tol).all();
}

GaussianSampler::GaussianSampler(const CovarianceModel& model, double mean,
                                 const PointMatrix& points)
    : mean_(mean) {
  if (static_cast<std::size_t>(points.rows()) > kMaxSimulationPoints) {
    fail(ErrorCode::InvalidArgument,
         "grid too large for dense simulation (" + std::to_string(points.rows()) + " points)");
  }
  auto system = CovarianceSystem::factorize(covariance_matrix(model, points));
  ridge_ = system.ridge();
  factor_ = system.chol();
}

Eigen::VectorXd GaussianSampler::sample(std::uint64_t seed) const {
  NormalStream normals(seed);
  Eigen::VectorXd z(factor_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normals();
  Eigen::VectorXd values = factor_.triangularView<Eigen::Lower>() * z;
  values.array() += mean_;
  return values;
}

void check_marginal_matches(const CovarianceModel& model, const GaussianMarginal& marginal) {
  marginal.validate();
  const double s2 = marginal.sigma * marginal.sigma;
  if (std::abs(s2 - model.sigma2()) > 1e-12 * model.sigma2()) {
    fail(ErrorCode::InvalidArgument, "marginal variance differs from the covariance model's C(0)");
  }
}

FieldPath simulate_path(const CovarianceModel& model, const GaussianMarginal& marginal,
                        const GridSpec& grid, std::uint64_t seed) {
  check_marginal_matches(model, marginal);
  GaussianSampler sampler(model, marginal.mu, grid.points());
  return FieldPath{grid, sampler.sample(seed), seed, marginal};
}

ObservationSet restrict_to_observations(const FieldPath& path, const PointMatrix& obs_locations) {
  if (static_cast<std::size_t>(obs_locations.cols()) != path.grid.dim()) {
    fail(ErrorCode::GridMismatch, "observation dimension differs from the path grid");
  }
  PointMatrix locations(obs_locations.rows(), obs_locations.cols());
  Eigen::VectorXd values(obs_locations.rows());
  for (Eigen::Index j = 0; j < obs_locations.rows(); ++j) {
    auto idx = path.grid.index_of(row_span(obs_locations, j));
    if (!idx) {
      fail(ErrorCode::GridMismatch,
           "observation location " + std::to_string(j) + " is not a grid point");
    }
    auto p = path.grid.point(*idx);
    for (Eigen::Index i = 0; i < locations.cols(); ++i) locations(j, i) = p[static_cast<std::size_t>(i)];
    values[j] = path.values[static_cast<Eigen::Index>(*idx)];
  }
  return ObservationSet(std::move(locations), std::move(values));
}

}  // namespace levex
