#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "levex/covariance.hpp"
#include "levex/spd_solve.hpp"

namespace levex {

enum class Method {
  LevelsetUnknownMean,
  LevelsetKnownMean,
  SimpleKriging,
  OrdinaryKriging,
};

inline constexpr Method kAllMethods[] = {Method::LevelsetUnknownMean, Method::LevelsetKnownMean,
                                         Method::SimpleKriging, Method::OrdinaryKriging};

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

enum class Degeneracy {
  None,
  SingleObservation,  // n = 1
  CollinearWithOnes,  // c_t parallel to e: every feasible weight is optimal
  ZeroCovariance,     // c_t = 0
};

std::string_view to_string(Degeneracy reason);

struct PredictorWeights {
  Eigen::VectorXd lambda;
  Method method = Method::LevelsetUnknownMean;
  double objective = 0.0;  // c_t' lambda
  Degeneracy degeneracy = Degeneracy::None;

  bool degenerate() const { return degeneracy != Degeneracy::None; }
};

// `fallback` is the observation index returned as e_j when the problem is
// degenerate; callers pass the observation nearest to the prediction point.
// When c_t equals that column of Sigma (t is an observation location) every
// method returns e_j directly.

/// Maximizes c_t' lambda subject to lambda' Sigma lambda = sigma2 and
/// sum(lambda) = 1:
///   lambda = sqrt((sigma2 b2 - 1)/(b0 b2 - b1^2)) S^-1 (c_t - (b1/b2) e) + S^-1 e / b2.
PredictorWeights levelset_unknown_mean(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                       double sigma2, std::size_t fallback = 0);

/// Maximizes c_t' lambda subject to lambda' Sigma lambda = sigma2 only:
///   lambda = sigma S^-1 c_t / sqrt(b0).
PredictorWeights levelset_known_mean(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                     double sigma2, std::size_t fallback = 0);

/// lambda = S^-1 c_t.
PredictorWeights simple_kriging(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                std::size_t hint = 0);

/// lambda = S^-1 (c_t + ((1 - b1)/b2) e).
PredictorWeights ordinary_kriging(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                                  std::size_t hint = 0);

PredictorWeights compute_weights(Method method, const CovarianceSystem& system,
                                 const Eigen::VectorXd& ct, double sigma2,
                                 std::size_t fallback = 0);

/// Weights at location t, with c_t and the degenerate fallback taken from
/// the model and the observation geometry.
PredictorWeights weights_at(Method method, const CovarianceModel& model,
                            const ObservationSet& obs, const CovarianceSystem& system,
                            std::span<const double> t);

/// Methods that assume a known mean (simple kriging, level-set with known
/// mean) predict mean + sum lambda_j (X(t_j) - mean); the others return
/// sum lambda_j X(t_j).
double predict(const PredictorWeights& weights, const Eigen::VectorXd& values, double mean);

/// Analytical E[(Xhat(t) - X(t))^2].
double mse(Method method, const BQuantities& bq, double sigma2);

enum class ConstraintSet { Ellipsoid, EllipsoidAndSimplex };

/// Largest c_t' lambda over `samples` random points of the feasible set
/// (uniform directions mapped onto the constraint ellipsoid). Independent
/// check of the closed forms; n <= 6 and samples >= 1e5.
double brute_force_objective(const CovarianceSystem& system, const Eigen::VectorXd& ct,
                             double sigma2, ConstraintSet constraints, std::size_t samples,
                             std::uint64_t seed = 1);

}  // namespace levex
