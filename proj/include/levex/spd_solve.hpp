#pragma once

#include <Eigen/Core>

#include "levex/covariance.hpp"

namespace levex {

/// Quadratic forms of the constrained weight problem:
/// b0 = c' S^-1 c, b1 = e' S^-1 c, b2 = e' S^-1 e.
/// Computed from the whitened vectors g = L^-1 c, h = L^-1 e (S = L L').
struct BQuantities {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  Eigen::VectorXd sigma_inv_ct;
  Eigen::VectorXd sigma_inv_e;
  Eigen::VectorXd white_ct;  // g
  Eigen::VectorXd white_e;   // h
  /// |g - (b1/b2) h|^2, formed directly instead of as a difference of products.
  double residual2 = 0.0;

  /// b0 b2 - b1^2 = b2 |g - (b1/b2) h|^2, never negative.
  double discriminant() const { return b2 * residual2; }

  /// True when c_t is parallel to e, judged relative to b0 b2.
  bool collinear() const;
};

/// Solves (Sigma + ridge I) x = rhs through the stored Cholesky factor.
Eigen::VectorXd solve_spd(const CovarianceSystem& system, const Eigen::VectorXd& rhs);

BQuantities b_quantities(const CovarianceSystem& system, const Eigen::VectorXd& ct);

}  // namespace levex
