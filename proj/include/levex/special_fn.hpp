#pragma once

#include <span>

namespace levex {

/// Univariate N(mu, sigma^2) law of the field and of any admissible predictor.
struct GaussianMarginal {
  double mu = 0.0;
  double sigma = 1.0;

  /// Throws ErrorCode::InvalidArgument unless sigma is finite and positive.
  void validate() const;
};

/// Phi_{mu,sigma}(x).
double normal_cdf(double x, const GaussianMarginal& marginal);

/// 1 - Phi_{mu,sigma}(x), evaluated through erfc so the upper tail keeps
/// full relative precision.
double normal_sf(double x, const GaussianMarginal& marginal);

/// Standard normal quantile. p must lie in (0, 1).
double normal_quantile(double p);

/// Bessel function of the first kind, order zero. Power series for |x| <= 12,
/// Hankel asymptotic expansion beyond.
double bessel_j0(double x);

/// P(X > u, Y > u) for a bivariate normal pair with common marginal and
/// correlation rho:
///
///   sf(u)^2 + 1/(2 pi) * int_0^{asin rho} exp(-z^2 / (1 + sin theta)) dtheta,
///
/// with z = (u - mu) / sigma. rho is clamped to [-1, 1] when it overshoots by
/// at most 1e-9; larger violations throw ErrorCode::Domain.
double joint_exceedance(double u, double rho, const GaussianMarginal& marginal);

/// Sum of joint_exceedance over the given levels.
double target_functional(std::span<const double> levels, double rho,
                         const GaussianMarginal& marginal);

}  // namespace levex
