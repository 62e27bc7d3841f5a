#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "levex/covariance.hpp"

namespace levex::fixtures {

inline const CovarianceKind kModelKinds[] = {CovarianceKind::Exponential, CovarianceKind::Gaussian,
                                             CovarianceKind::BesselJ0, CovarianceKind::Sinc};

// Isotropic J0 is positive definite only up to d = 2, sinc up to d = 3.
inline std::size_t valid_dim(CovarianceKind kind, std::size_t d) {
  if (kind == CovarianceKind::BesselJ0) return std::min<std::size_t>(d, 2);
  if (kind == CovarianceKind::Sinc) return std::min<std::size_t>(d, 3);
  return d;
}

inline PointMatrix points_1d(const std::vector<double>& xs) {
  PointMatrix p(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = xs[i];
  return p;
}

inline ObservationSet geometry(const PointMatrix& p) {
  return ObservationSet(p, Eigen::VectorXd::Zero(p.rows()));
}

// A random prediction problem: distinct locations in [0, span]^d, a
// prediction point and the resulting system. Locations are kept at least
// `min_gap` apart so Sigma stays comfortably nonsingular.
struct Instance {
  CovarianceModel model;
  PointMatrix points;
  std::vector<double> t;
};

inline Instance random_instance(std::mt19937_64& rng, CovarianceKind kind, std::size_t n,
                                std::size_t d = 1) {
  std::uniform_real_distribution<double> sig(0.5, 2.0);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  const double sigma2 = sig(rng);
  const double length = scale(rng);
  const double span = 1.5 * static_cast<double>(n) * length;
  std::uniform_real_distribution<double> pos(0.0, span);
  const double min_gap = 0.6 * length;
  PointMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      for (std::size_t k = 0; k < d; ++k) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = pos(rng);
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        ok = (p.row(static_cast<Eigen::Index>(i)) - p.row(static_cast<Eigen::Index>(j))).norm() >= min_gap;
      }
      if (ok) break;
    }
  }
  std::vector<double> t(d);
  for (auto& x : t) x = pos(rng);
  return {CovarianceModel(kind, sigma2, length), p, t};
}

}  // namespace levex::fixtures
