#include "levex/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "levex/error.hpp"
#include "levex/rng.hpp"

namespace levex {
namespace {

constexpr std::size_t kExactnessSpotChecks = 5;

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs body(i) for i in [0, jobs) on `threads` workers; the first exception
// is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t jobs, unsigned threads, Body&& body) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        while (!stop.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            stop = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Grid indices of `points` inside `grid`.
std::vector<Eigen::Index> locate(const GridSpec& grid, const PointMatrix& points) {
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    auto found = grid.index_of(row_span(points, j));
    if (!found) {
      fail(ErrorCode::Config, "observation grid is not contained in the evaluation grid");
    }
    idx.push_back(static_cast<Eigen::Index>(*found));
  }
  return idx;
}

struct MethodPlan {
  Method method;
  std::vector<PredictorWeights> weights;  // one per eval point
};

struct ReplicationResult {
  std::vector<double> sym_diff;  // methods x levels
  std::vector<double> var_hat;   // truth, then methods
  double exactness = 0.0;
};

}  // namespace

void StudyConfig::validate() const {
  check_marginal_matches(model, marginal);
  if (window.dim() == 0) fail(ErrorCode::Config, "window is empty");
  if (!(obs_mesh > 0.0) || !(eval_mesh > 0.0)) fail(ErrorCode::Config, "meshes must be positive");
  if (eval_mesh > obs_mesh) fail(ErrorCode::Config, "eval_mesh must not exceed obs_mesh");
  if (methods.empty()) fail(ErrorCode::Config, "at least one method is required");
  if (replications < 1) fail(ErrorCode::Config, "replications must be at least 1");
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "cannot summarize an empty table");
  SummaryStats s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double sample_variance(const Eigen::VectorXd& values) {
  if (values.size() < 2) return 0.0;
  const double mean = values.mean();
  return (values.array() - mean).square().sum() / static_cast<double>(values.size() - 1);
}

std::vector<LevelSummary> summarize_raw(const std::vector<RawRecord>& raw,
                                        const std::vector<Method>& methods,
                                        const ExcursionLevels& levels) {
  if (raw.empty()) fail(ErrorCode::InvalidArgument, "cannot summarize an empty table");
  std::vector<LevelSummary> out;
  for (Method m : methods) {
    for (double u : levels.values()) {
      std::vector<double> values;
      for (const auto& r : raw) {
        if (r.method == m && r.level == u) values.push_back(r.sym_diff);
      }
      if (values.empty()) continue;
      out.push_back({m, u, summarize(values)});
    }
  }
  return out;
}

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  StudyReport report;
  report.eval_grid = GridSpec::build(config.window, config.eval_mesh);
  const GridSpec& eval_grid = report.eval_grid;
  const GridSpec obs_grid = GridSpec::build(config.window, config.obs_mesh);
  const std::vector<Eigen::Index> obs_index = locate(eval_grid, obs_grid.points());
  const auto n_eval = static_cast<Eigen::Index>(eval_grid.size());
  const auto n_obs = static_cast<Eigen::Index>(obs_index.size());

  // Weights depend only on geometry: compute once for all replications.
  const ObservationSet geometry(obs_grid.points(), Eigen::VectorXd::Zero(n_obs));
  const CovarianceSystem system = build_sigma(config.model, geometry);
  report.observation_ridge = system.ridge();
  const double sigma2 = config.model.sigma2();

  std::vector<MethodPlan> plans;
  for (Method m : config.methods) {
    MethodPlan plan{m, {}};
    plan.weights.reserve(static_cast<std::size_t>(n_eval));
    Eigen::VectorXd curve(n_eval);
    for (Eigen::Index i = 0; i < n_eval; ++i) {
      auto t = eval_grid.point(static_cast<std::size_t>(i));
      const Eigen::VectorXd ct = build_ct(config.model, geometry, t);
      plan.weights.push_back(compute_weights(m, system, ct, sigma2, geometry.nearest(t)));
      curve[i] = mse(m, b_quantities(system, ct), sigma2);
    }
    report.mse_curve[m] = std::move(curve);
    plans.push_back(std::move(plan));
  }

  const GaussianSampler sampler(config.model, config.marginal.mu, eval_grid.points());
  report.simulation_ridge = sampler.ridge();
  const auto& levels = config.levels.values();
  const double cell = eval_grid.cell_volume();
  const double mu = config.marginal.mu;

  std::vector<ReplicationResult> results(config.replications);
  auto run_one = [&](std::size_t r) {
    const Eigen::VectorXd truth = sampler.sample(replication_seed(config.master_seed, r));
    Eigen::VectorXd observed(n_obs);
    for (Eigen::Index j = 0; j < n_obs; ++j) observed[j] = truth[obs_index[static_cast<std::size_t>(j)]];

    ReplicationResult& out = results[r];
    out.var_hat.push_back(sample_variance(truth));
    Eigen::VectorXd predicted(n_eval);
    for (const auto& plan : plans) {
      for (Eigen::Index i = 0; i < n_eval; ++i) {
        predicted[i] = predict(plan.weights[static_cast<std::size_t>(i)], observed, mu);
      }
      for (double u : levels) {
        out.sym_diff.push_back(cell * static_cast<double>(count_disagreements(truth, predicted, u)));
      }
      out.var_hat.push_back(sample_variance(predicted));
      if (r < kExactnessSpotChecks) {
        for (Eigen::Index j = 0; j < n_obs; ++j) {
          const Eigen::Index i = obs_index[static_cast<std::size_t>(j)];
          out.exactness = std::max(out.exactness, std::abs(predicted[i] - truth[i]));
        }
      }
    }
  };
  parallel_for(config.replications, resolve_threads(config.threads, config.replications), run_one);

  std::map<std::string, std::vector<double>> variance_series;
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& res = results[r];
    std::size_t k = 0;
    for (const auto& plan : plans) {
      for (double u : levels) report.raw.push_back({r, plan.method, u, res.sym_diff[k++]});
    }
    report.variances.push_back({kTruthSeries, r, res.var_hat[0]});
    variance_series[kTruthSeries].push_back(res.var_hat[0]);
    for (std::size_t m = 0; m < plans.size(); ++m) {
      const std::string name(to_string(plans[m].method));
      report.variances.push_back({name, r, res.var_hat[m + 1]});
      variance_series[name].push_back(res.var_hat[m + 1]);
    }
    report.exactness_max_deviation = std::max(report.exactness_max_deviation, res.exactness);
  }
  for (const auto& [name, values] : variance_series) {
    report.variance_summaries[name] = summarize(values);
  }
  report.summaries = summarize_raw(report.raw, config.methods, config.levels);
  return report;
}

PredictionTable predict_grid(const CovarianceModel& model, const GaussianMarginal& marginal,
                             const ObservationSet& obs, const GridSpec& grid,
                             const std::vector<Method>& methods) {
  check_marginal_matches(model, marginal);
  if (obs.dim() != grid.dim()) fail(ErrorCode::InvalidArgument, "observation dimension differs from grid");
  if (methods.empty()) fail(ErrorCode::InvalidArgument, "at least one method is required");
  const CovarianceSystem system = build_sigma(model, obs);
  const double sigma2 = model.sigma2();

  PredictionTable table;
  table.grid = grid;
  table.rows.reserve(methods.size() * grid.size());
  std::vector<Eigen::VectorXd> cts;
  std::vector<BQuantities> bqs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cts.push_back(build_ct(model, obs, grid.point(i)));
    bqs.push_back(b_quantities(system, cts.back()));
  }
  for (Method m : methods) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const PredictorWeights w =
          compute_weights(m, system, cts[i], sigma2, obs.nearest(grid.point(i)));
      table.rows.push_back({i, m, predict(w, obs.values(), marginal.mu), w.objective,
                            mse(m, bqs[i], sigma2), w.degeneracy});
    }
  }
  return table;
}

ConsistencyResult consistency_experiment(const CovarianceModel& model,
                                         const GaussianMarginal& marginal, const Window& window,
                                         std::span<const double> t,
                                         std::span<const double> meshes,
                                         std::uint64_t master_seed, std::size_t replications) {
  check_marginal_matches(model, marginal);
  if (t.size() != window.dim()) fail(ErrorCode::InvalidArgument, "point dimension differs from window");
  if (!window.contains(t)) fail(ErrorCode::InvalidArgument, "prediction point lies outside the window");
  if (meshes.empty()) fail(ErrorCode::InvalidArgument, "mesh sequence is empty");

  ConsistencyResult result;
  result.method = marginal.mu == 0.0 ? Method::LevelsetKnownMean : Method::LevelsetUnknownMean;
  for (std::size_t i = 1; i < meshes.size(); ++i) {
    if (!(meshes[i] < meshes[i - 1])) {
      result.warnings.push_back("mesh sequence is not strictly decreasing; the almost-sure "
                                "clause needs summable mesh^alpha");
      break;
    }
  }
  if (GridSpec::build(window, meshes.front()).index_of(t)) {
    fail(ErrorCode::InvalidArgument, "prediction point lies on the coarsest observation grid");
  }

  const double d = static_cast<double>(window.dim());
  const double k = model.holder_k();
  const double alpha = model.holder_alpha();
  const double sigma2 = model.sigma2();
  for (std::size_t level = 0; level < meshes.size(); ++level) {
    const double h = meshes[level];
    const GridSpec grid = GridSpec::build(window, h);
    const ObservationSet geometry(grid.points(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())));
    const CovarianceSystem system = build_sigma(model, geometry);
    const Eigen::VectorXd ct = build_ct(model, geometry, t);
    const std::size_t nearest = geometry.nearest(t);
    const PredictorWeights w = compute_weights(result.method, system, ct, sigma2, nearest);

    ConsistencyPoint point;
    point.mesh = h;
    point.observations = grid.size();
    double d2 = 0.0;
    auto loc = geometry.location(nearest);
    for (std::size_t i = 0; i < t.size(); ++i) d2 += (loc[i] - t[i]) * (loc[i] - t[i]);
    point.min_distance = std::sqrt(d2);
    point.analytical_mse = mse(result.method, b_quantities(system, ct), sigma2);
    point.holder_bound = 2.0 * k * std::pow(std::sqrt(d) * h / 2.0, alpha);
    point.distance_bound = 2.0 * k * std::pow(point.min_distance, alpha);

    if (grid.index_of(t)) {
      point.empirical_mse = 0.0;  // t is observed: every method is exact there
    } else if (replications > 0) {
      PointMatrix joint(grid.points().rows() + 1, grid.points().cols());
      joint.topRows(grid.points().rows()) = grid.points();
      for (std::size_t i = 0; i < t.size(); ++i) joint(joint.rows() - 1, static_cast<Eigen::Index>(i)) = t[i];
      const GaussianSampler sampler(model, marginal.mu, joint);
      const std::uint64_t stream = replication_seed(master_seed, level);
      double sum = 0.0;
      for (std::size_t r = 0; r < replications; ++r) {
        const Eigen::VectorXd x = sampler.sample(replication_seed(stream, r));
        const Eigen::VectorXd observed = x.head(x.size() - 1);
        const double err = predict(w, observed, marginal.mu) - x[x.size() - 1];
        sum += err * err;
      }
      point.empirical_mse = sum / static_cast<double>(replications);
    }
    result.points.push_back(point);
  }
  return result;
}

}  // namespace levex
