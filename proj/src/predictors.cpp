#include "levex/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "levex/error.hpp"

namespace levex {
namespace {

constexpr double kNegativeGuard = 1e-10;
// Below this |c_t| the quadratic forms underflow; treat c_t as zero.
constexpr double kZeroCovariance = 1e-150;

PredictorWeights unit_weights(Method method, const Eigen::VectorXd& ct, std::size_t index,
                              Degeneracy reason) {
  if (index >= static_cast<std::size_t>(ct.size())) {
    fail(ErrorCode::InvalidArgument, "fallback observation index out of range");
  }
  PredictorWeights w;
  w.method = method;
  w.lambda = Eigen::VectorXd::Unit(ct.size(), static_cast<Eigen::Index>(index));
  w.objective = ct[static_cast<Eigen::Index>(index)];
  w.degeneracy = reason;
  return w;
}

bool is_zero_covariance(const Eigen::VectorXd& ct, double sigma2) {
  return ct.size() == 0 || ct.cwiseAbs().maxCoeff() <= kZeroCovariance * sigma2;
}

void check_inputs(const CovarianceSystem& system, const Eigen::VectorXd& ct) {
  if (static_cast<std::size_t>(ct.size()) != system.size()) {
    fail(ErrorCode::InvalidArgument, "c_t length differs from the number of observations");
  }
  if (!ct.allFinite()) fail(ErrorCode::InvalidArgument, "c_t must be finite");
}

void check_sigma2(double sigma2) {
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) {
    fail(ErrorCode::InvalidArgument, "sigma2 must be positive");
  }
}

// t sits on observation `index`: c_t is that column of Sigma and every method
// interpolates, lambda = e_index. Solving would only add conditioning error.
bool on_observation(const CovarianceSystem& system, const Eigen::VectorXd& ct, std::size_t index) {
  if (index >= system.size()) return false;
  const auto col = system.sigma().col(static_cast<Eigen::Index>(index));
  return (ct - col).cwiseAbs().maxCoeff() <= 4.0 * std::numeric_limits<double>::epsilon() * system.sigma2();
}

PredictorWeights interpolating(Method method, const Eigen::VectorXd& ct, std::size_t index) {
  return unit_weights(method, ct, index, Degeneracy::None);
}

// x' S y accumulated in long double; with ill-conditioned S the weights can
// reach 1e4 and a double sum loses the constraint in rounding.
long double quad_form(const Eigen::MatrixXd& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  long double total = 0.0L;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    long double col = 0.0L;
    for (Eigen::Index i = 0; i < S.rows(); ++i) col += static_cast<long double>(x[i]) * S(i, j);
    total += col * y[j];
  }
  return total;
}

// Pulls lambda = base + kappa (lambda - base) back onto lambda' S lambda = sigma2
// (kappa near 1). The solve leaves a relative error of order cond(S) * eps,
// which is visible for the band-limited models.
Eigen::VectorXd onto_ellipsoid(const Eigen::MatrixXd& S, const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& base, double sigma2) {
  const Eigen::VectorXd d = lambda - base;
  const long double a = quad_form(S, d, d);
  const long double b = quad_form(S, d, base);
  const long double c = quad_form(S, base, base) - sigma2;
  const long double disc = b * b - a * c;
  if (!(a > 0.0L) || disc < 0.0L) return lambda;
  const long double kappa = (-b + std::sqrt(disc)) / a;
  if (!(std::abs(kappa - 1.0L) < 1e-3L)) return lambda;
  return base + static_cast<double>(kappa) * d;
}

double guarded(double value, double scale, const char* what) {
  if (value >= 0.0) return value;
  if (value >= -kNegativeGuard * std::max(scale, 1.0)) return 0.0;
  fail(ErrorCode::Numerical, std::string(what) + " is negative beyond rounding");
}

Eigen::VectorXd uniform_direction(std::mt19937_64& engine, Eigen::Index dim) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal(engine);
    norm = z.norm();
  } while (norm == 0.0);
  return z / norm;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::LevelsetUnknownMean: return "levelset_unknown_mean";
    case Method::LevelsetKnownMean: return "levelset_known_mean";
    case Method::SimpleKriging: return "simple_kriging";
    case Method::OrdinaryKriging: return "ordinary_kriging";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorCode::Config, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Degeneracy reason) {
  switch (reason) {
    case Degeneracy::None: return "";
    case Degeneracy::SingleObservation: return "single_observation";
    case Degeneracy::CollinearWithOnes: return "collinear_with_ones";
    case Degeneracy::ZeroCovariance: return "zero_covariance";
  }
  return "";
}

PredictorWeights levelset_unknown_mean(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                       double sigma2, std::size_t fallback) {
  check_inputs(system, ct);
  check_sigma2(sigma2);
  constexpr Method method = Method::LevelsetUnknownMean;
  // sigma2 b2 - 1 vanishes for n = 1 and the closed form turns into 0 * (0/0).
  if (system.size() == 1) return unit_weights(method, ct, 0, Degeneracy::SingleObservation);
  if (on_observation(system, ct, fallback)) return interpolating(method, ct, fallback);
  if (is_zero_covariance(ct, sigma2)) {
    return unit_weights(method, ct, fallback, Degeneracy::ZeroCovariance);
  }
  const BQuantities bq = b_quantities(system, ct);
  if (bq.collinear()) return unit_weights(method, ct, fallback, Degeneracy::CollinearWithOnes);

  const double excess = guarded(sigma2 * bq.b2 - 1.0, sigma2 * bq.b2, "sigma2 b2 - 1");

  // In whitened coordinates y = L' lambda the problem is: maximize g'y with
  // |y|^2 = sigma2 and h'y = 1, solved by y = h/b2 + s w, w = g - (b1/b2) h.
  // This is the closed form
  //   sqrt((sigma2 b2 - 1)/(b0 b2 - b1^2)) S^-1 (c_t - (b1/b2) e) + S^-1 e / b2
  // but never subtracts b1^2 from b0 b2.
  const Eigen::VectorXd w_dir = bq.white_ct - (bq.b1 / bq.b2) * bq.white_e;
  const Eigen::VectorXd y = bq.white_e / bq.b2 + std::sqrt(excess / bq.b2 / bq.residual2) * w_dir;

  PredictorWeights w;
  w.method = method;
  w.lambda = system.llt().matrixU().solve(y);
  // Normalized by its own sum: b2 from h'h and from e' S^-1 e differ by cond(S) eps.
  w.lambda += ((1.0 - w.lambda.sum()) / bq.sigma_inv_e.sum()) * bq.sigma_inv_e;
  // e/n has unit sum, lies inside the ellipsoid and, unlike S^-1 e / b2, is small.
  const Eigen::VectorXd centre =
      Eigen::VectorXd::Constant(ct.size(), 1.0 / static_cast<double>(ct.size()));
  for (int pass = 0; pass < 2; ++pass) {
    w.lambda = onto_ellipsoid(system.sigma(), w.lambda, centre, sigma2);
  }
  w.objective = ct.dot(w.lambda);
  return w;
}

PredictorWeights levelset_known_mean(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                     double sigma2, std::size_t fallback) {
  check_inputs(system, ct);
  check_sigma2(sigma2);
  constexpr Method method = Method::LevelsetKnownMean;
  if (on_observation(system, ct, fallback)) return interpolating(method, ct, fallback);
  if (is_zero_covariance(ct, sigma2)) {
    return unit_weights(method, ct, fallback, Degeneracy::ZeroCovariance);
  }
  // sigma S^-1 c_t / sqrt(b0) = sigma L'^-1 g / |g|.
  const Eigen::VectorXd g = system.llt().matrixL().solve(ct);
  const double b0 = g.squaredNorm();
  if (!(b0 > 0.0)) return unit_weights(method, ct, fallback, Degeneracy::ZeroCovariance);

  PredictorWeights w;
  w.method = method;
  w.lambda = system.llt().matrixU().solve(g * (std::sqrt(sigma2) / std::sqrt(b0)));
  for (int pass = 0; pass < 2; ++pass) {
    w.lambda = onto_ellipsoid(system.sigma(), w.lambda, Eigen::VectorXd::Zero(ct.size()), sigma2);
  }
  w.objective = ct.dot(w.lambda);
  return w;
}

PredictorWeights simple_kriging(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                std::size_t hint) {
  check_inputs(system, ct);
  if (on_observation(system, ct, hint)) return interpolating(Method::SimpleKriging, ct, hint);
  PredictorWeights w;
  w.method = Method::SimpleKriging;
  w.lambda = solve_spd(system, ct);
  w.objective = ct.dot(w.lambda);
  return w;
}

PredictorWeights ordinary_kriging(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                  std::size_t hint) {
  check_inputs(system, ct);
  if (on_observation(system, ct, hint)) return interpolating(Method::OrdinaryKriging, ct, hint);
  const BQuantities bq = b_quantities(system, ct);
  const double delta = (1.0 - bq.b1) / bq.b2;
  PredictorWeights w;
  w.method = Method::OrdinaryKriging;
  w.lambda = bq.sigma_inv_ct + delta * bq.sigma_inv_e;
  w.lambda += ((1.0 - w.lambda.sum()) / bq.sigma_inv_e.sum()) * bq.sigma_inv_e;
  w.objective = ct.dot(w.lambda);
  return w;
}

PredictorWeights compute_weights(Method method, const CovarianceSystem& system,
                                 const Eigen::VectorXd& ct, double sigma2, std::size_t fallback) {
  switch (method) {
    case Method::LevelsetUnknownMean: return levelset_unknown_mean(system, ct, sigma2, fallback);
    case Method::LevelsetKnownMean: return levelset_known_mean(system, ct, sigma2, fallback);
    case Method::SimpleKriging: return simple_kriging(system, ct, fallback);
    case Method::OrdinaryKriging: return ordinary_kriging(system, ct, fallback);
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

PredictorWeights weights_at(Method method, const CovarianceModel& model,
                            const ObservationSet& obs, const CovarianceSystem& system,
                            std::span<const double> t) {
  const Eigen::VectorXd ct = build_ct(model, obs, t);
  return compute_weights(method, system, ct, model.sigma2(), obs.nearest(t));
}

double predict(const PredictorWeights& weights, const Eigen::VectorXd& values, double mean) {
  if (weights.lambda.size() != values.size()) {
    fail(ErrorCode::InvalidArgument, "weight and observation counts differ");
  }
  switch (weights.method) {
    case Method::SimpleKriging:
    case Method::LevelsetKnownMean:
      return mean + weights.lambda.dot((values.array() - mean).matrix());
    case Method::LevelsetUnknownMean:
    case Method::OrdinaryKriging:
      break;
  }
  return weights.lambda.dot(values);
}

double mse(Method method, const BQuantities& bq, double sigma2) {
  check_sigma2(sigma2);
  double value = 0.0;
  switch (method) {
    case Method::LevelsetUnknownMean: {
      const double disc = bq.discriminant();
      const double excess = std::max(sigma2 * bq.b2 - 1.0, 0.0);
      value = 2.0 * (sigma2 - bq.b1 / bq.b2 - std::sqrt(disc * excess) / bq.b2);
      break;
    }
    case Method::LevelsetKnownMean: {
      const double sigma = std::sqrt(sigma2);
      value = 2.0 * sigma * (sigma - std::sqrt(std::max(bq.b0, 0.0)));
      break;
    }
    case Method::SimpleKriging:
      value = sigma2 - bq.b0;
      break;
    case Method::OrdinaryKriging: {
      const double gap = 1.0 - bq.b1;
      value = sigma2 - bq.b0 + gap * gap / bq.b2;
      break;
    }
  }
  return std::max(value, 0.0);
}

double brute_force_objective(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                             double sigma2, ConstraintSet constraints, std::size_t samples,
                             std::uint64_t seed) {
  check_inputs(system, ct);
  check_sigma2(sigma2);
  const auto n = static_cast<Eigen::Index>(system.size());
  if (n > 6) fail(ErrorCode::InvalidArgument, "brute-force oracle limited to n <= 6");
  if (samples < 100'000) fail(ErrorCode::InvalidArgument, "brute-force oracle needs >= 1e5 samples");

  std::mt19937_64 engine(seed);
  const double sigma = std::sqrt(sigma2);
  double best = -std::numeric_limits<double>::infinity();

  if (constraints == ConstraintSet::Ellipsoid) {
    // lambda = sigma L^-T z  =>  lambda' (L L') lambda = sigma2.
    const auto upper = system.llt().matrixU();
    for (std::size_t s = 0; s < samples; ++s) {
      const Eigen::VectorXd lambda = sigma * upper.solve(uniform_direction(engine, n));
      best = std::max(best, ct.dot(lambda));
    }
    return best;
  }

  const Eigen::VectorXd sigma_inv_e = system.sigma_inv_e();
  const double b2 = sigma_inv_e.sum();
  const Eigen::VectorXd center = sigma_inv_e / b2;  // Sigma-closest point of the hyperplane
  if (n == 1) return ct.dot(center);
  const double radius2 = sigma2 - 1.0 / b2;
  if (radius2 < 0.0) fail(ErrorCode::Numerical, "ellipsoid misses the sum-to-one hyperplane");

  // Basis of {v : e'v = 0}; every such v is Sigma-orthogonal to `center`.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    basis(i, i) = 1.0;
    basis(i + 1, i) = -1.0;
  }
  const Eigen::MatrixXd reduced = basis.transpose() * system.sigma() * basis;
  Eigen::LLT<Eigen::MatrixXd> reduced_llt(reduced);
  if (reduced_llt.info() != Eigen::Success) {
    fail(ErrorCode::Numerical, "restricted covariance not positive definite");
  }
  const auto reduced_upper = reduced_llt.matrixU();
  const double radius = std::sqrt(radius2);
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd v = basis * reduced_upper.solve(uniform_direction(engine, n - 1));
    const Eigen::VectorXd lambda = center + radius * v;
    best = std::max(best, ct.dot(lambda));
  }
  return best;
}

}  // namespace levex
