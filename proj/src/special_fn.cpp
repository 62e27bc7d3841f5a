#include "levex/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levex/error.hpp"

namespace levex {
namespace {

constexpr double kRhoClampTolerance = 1e-9;
constexpr double kQuadratureTolerance = 1e-12;
constexpr double kSeriesCutoff = 12.0;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be finite");
  }
}

double clamp_correlation(double rho) {
  if (std::isnan(rho) || std::abs(rho) > 1.0 + kRhoClampTolerance) {
    fail(ErrorCode::Domain, "correlation out of range");
  }
  return std::clamp(rho, -1.0, 1.0);
}

// (1 - sin t) / cos^2 t == 1 / (1 + sin t); the right-hand side has no 0/0 at
// t = pi/2.
double exceedance_kernel(double z2, double theta) {
  if (z2 == 0.0) return 1.0;
  const double denom = 1.0 + std::sin(theta);
  if (denom <= 0.0) return 0.0;
  return std::exp(-z2 / denom);
}

template <class F>
double integrate_to_asin(F&& integrand, double rho) {
  const double upper = std::asin(rho);
  if (upper == 0.0) return 0.0;
  const double a = std::min(0.0, upper);
  const double b = std::max(0.0, upper);
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          integrand, a, b, 15, kQuadratureTolerance, &error);
  return upper > 0.0 ? value : -value;
}

double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int s = 1; s < 200; ++s) {
    term *= -q / (static_cast<double>(s) * s);
    sum += term;
    if (std::abs(term) < 1e-17 && s > x) break;
  }
  return sum;
}

double j0_asymptotic(double x) {
  // Hankel expansion J0(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi).
  const double eight_x = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double c = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= -(odd * odd) / (k * eight_x);
    if (std::abs(c) > previous) break;  // asymptotic series starts diverging
    previous = std::abs(c);
    switch (k % 4) {
      case 1: q += c; break;
      case 2: p -= c; break;
      case 3: q -= c; break;
      case 0: p += c; break;
    }
    if (std::abs(c) < 1e-17) break;
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) *
         (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

void GaussianMarginal::validate() const {
  if (!std::isfinite(mu)) fail(ErrorCode::InvalidArgument, "mean must be finite");
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    fail(ErrorCode::InvalidArgument, "standard deviation must be positive");
  }
}

double normal_cdf(double x, const GaussianMarginal& marginal) {
  require_finite(x, "normal_cdf argument");
  marginal.validate();
  const double z = (x - marginal.mu) / marginal.sigma;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_sf(double x, const GaussianMarginal& marginal) {
  require_finite(x, "normal_sf argument");
  marginal.validate();
  const double z = (x - marginal.mu) / marginal.sigma;
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::Domain, "quantile probability must lie in (0, 1)");
  }
  // Acklam's rational approximation followed by one Halley step on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double bessel_j0(double x) {
  require_finite(x, "bessel_j0 argument");
  const double ax = std::abs(x);
  return ax <= kSeriesCutoff ? j0_series(ax) : j0_asymptotic(ax);
}

double joint_exceedance(double u, double rho, const GaussianMarginal& marginal) {
  require_finite(u, "level");
  marginal.validate();
  rho = clamp_correlation(rho);
  const double z = (u - marginal.mu) / marginal.sigma;
  const double z2 = z * z;
  const double sf = normal_sf(u, marginal);
  const double integral =
      integrate_to_asin([z2](double t) { return exceedance_kernel(z2, t); }, rho);
  const double value = sf * sf + integral / (2.0 * std::numbers::pi);
  return std::clamp(value, std::max(0.0, 2.0 * sf - 1.0), sf);
}

double target_functional(std::span<const double> levels, double rho,
                         const GaussianMarginal& marginal) {
  if (levels.empty()) fail(ErrorCode::InvalidArgument, "level list is empty");
  marginal.validate();
  rho = clamp_correlation(rho);
  double squares = 0.0;
  for (double u : levels) {
    require_finite(u, "level");
    const double sf = normal_sf(u, marginal);
    squares += sf * sf;
  }
  auto integrand = [&](double t) {
    double sum = 0.0;
    for (double u : levels) {
      const double z = (u - marginal.mu) / marginal.sigma;
      sum += exceedance_kernel(z * z, t);
    }
    return sum;
  };
  return squares + integrate_to_asin(integrand, rho) / (2.0 * std::numbers::pi);
}

}  // namespace levex
