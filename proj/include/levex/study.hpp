#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "levex/covariance.hpp"
#include "levex/excursion.hpp"
#include "levex/predictors.hpp"
#include "levex/simulate.hpp"

namespace levex {

struct StudyConfig {
  CovarianceModel model;
  GaussianMarginal marginal;
  Window window;
  double obs_mesh;
  double eval_mesh;
  ExcursionLevels levels;
  std::vector<Method> methods;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;  // 0: one per hardware thread

  void validate() const;
};

struct SummaryStats {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Quartiles by linear interpolation between order statistics at
/// position p (n - 1) (the "inclusive" rule, R type 7).
SummaryStats summarize(std::span<const double> values);

/// Sample quantile under the same rule; values need not be sorted.
double quantile(std::span<const double> values, double p);

/// Unbiased sample variance (n - 1 denominator); 0 for a single value.
double sample_variance(const Eigen::VectorXd& values);

struct RawRecord {
  std::size_t replication;
  Method method;
  double level;
  double sym_diff;
};

struct LevelSummary {
  Method method;
  double level;
  SummaryStats stats;
};

inline constexpr const char* kTruthSeries = "truth";

struct VarianceRecord {
  std::string series;  // method name, or "truth" for the simulated field
  std::size_t replication;
  double var_hat;
};

struct StudyReport {
  std::vector<RawRecord> raw;  // replication-major, then method, then level
  std::vector<LevelSummary> summaries;
  std::vector<VarianceRecord> variances;
  std::map<std::string, SummaryStats> variance_summaries;
  GridSpec eval_grid;
  std::map<Method, Eigen::VectorXd> mse_curve;  // analytical MSE per eval point
  double exactness_max_deviation = 0.0;         // over spot-checked replications
  double simulation_ridge = 0.0;
  double observation_ridge = 0.0;
};

/// Summaries per (method, level) in the order methods x levels.
std::vector<LevelSummary> summarize_raw(const std::vector<RawRecord>& raw,
                                        const std::vector<Method>& methods,
                                        const ExcursionLevels& levels);

StudyReport run_study(const StudyConfig& config);

struct PredictionRow {
  std::size_t point;  // index into the grid
  Method method;
  double prediction;
  double objective;
  double mse;
  Degeneracy degeneracy;
};

struct PredictionTable {
  GridSpec grid;
  std::vector<PredictionRow> rows;  // method-major, grid order within a method
};

/// Predictions of every requested method at every grid point.
PredictionTable predict_grid(const CovarianceModel& model, const GaussianMarginal& marginal,
                             const ObservationSet& obs, const GridSpec& grid,
                             const std::vector<Method>& methods);

struct ConsistencyPoint {
  double mesh = 0.0;
  std::size_t observations = 0;
  double min_distance = 0.0;
  double analytical_mse = 0.0;
  double holder_bound = 0.0;     // 2 K (sqrt(d) h / 2)^alpha
  double distance_bound = 0.0;   // 2 K min_j |t_j - t|^alpha
  double empirical_mse = 0.0;
};

struct ConsistencyResult {
  Method method;
  std::vector<ConsistencyPoint> points;
  std::vector<std::string> warnings;
};

/// Analytical and Monte-Carlo MSE at t for observation grids of decreasing
/// mesh. Uses the known-mean predictor when mu = 0, the unknown-mean one
/// otherwise.
ConsistencyResult consistency_experiment(const CovarianceModel& model,
                                         const GaussianMarginal& marginal, const Window& window,
                                         std::span<const double> t,
                                         std::span<const double> meshes,
                                         std::uint64_t master_seed,
                                         std::size_t replications = 200);

}  // namespace levex
