#include "levex/levex.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "levex/config.hpp"
#include "levex/csv.hpp"
#include "levex/error.hpp"
#include "levex/excursion.hpp"
#include "levex/predictors.hpp"
#include "levex/rng.hpp"
#include "levex/simulate.hpp"
#include "levex/special_fn.hpp"
#include "levex/study.hpp"

struct levex_config {
  levex::RunConfig cfg;
};

struct levex_model {
  levex::CovarianceModel model;
};

struct levex_observations {
  levex::ObservationSet obs;
};

struct levex_path {
  levex::FieldPath path;
};

struct levex_prediction {
  levex::PredictionTable table;
};

struct levex_evaluation {
  std::vector<std::string> names;
  std::vector<double> totals;
  std::vector<levex::csv::EvaluationRow> rows;
};

struct levex_study {
  levex::StudyReport report;
};

namespace {

thread_local std::string g_last_error;

levex_status to_status(levex::ErrorCode code) {
  switch (code) {
    case levex::ErrorCode::InvalidArgument: return LEVEX_E_INVALID;
    case levex::ErrorCode::Config: return LEVEX_E_CONFIG;
    case levex::ErrorCode::Numerical: return LEVEX_E_NUMERICAL;
    case levex::ErrorCode::DuplicateLocation: return LEVEX_E_DUPLICATE;
    case levex::ErrorCode::GridMismatch: return LEVEX_E_GRID;
    case levex::ErrorCode::Io: return LEVEX_E_IO;
    case levex::ErrorCode::Domain: return LEVEX_E_DOMAIN;
  }
  return LEVEX_E_INTERNAL;
}

template <class F>
levex_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LEVEX_OK;
  } catch (const levex::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return LEVEX_E_INTERNAL;
}

template <class T>
void need(const T* p, const char* what) {
  if (p == nullptr) levex::fail(levex::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

levex::GaussianMarginal marginal_of(double mu, double sigma) {
  levex::GaussianMarginal m{mu, sigma};
  m.validate();
  return m;
}

levex::GridSpec eval_grid_of(const levex::RunConfig& cfg) {
  const double mesh = cfg.eval_mesh ? *cfg.eval_mesh : cfg.require_obs_mesh();
  return levex::GridSpec::build(cfg.require_window(), mesh);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* levex_version(void) { return LEVEX_VERSION; }

const char* levex_last_error(void) { return g_last_error.c_str(); }

const char* levex_status_name(levex_status status) {
  switch (status) {
    case LEVEX_OK: return "ok";
    case LEVEX_E_INVALID: return "invalid argument";
    case LEVEX_E_CONFIG: return "configuration error";
    case LEVEX_E_NUMERICAL: return "numerical failure";
    case LEVEX_E_DUPLICATE: return "duplicate location";
    case LEVEX_E_GRID: return "grid mismatch";
    case LEVEX_E_IO: return "I/O error";
    case LEVEX_E_DOMAIN: return "domain error";
    case LEVEX_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void levex_string_free(char* s) { std::free(s); }

levex_status levex_normal_cdf(double x, double mu, double sigma, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = levex::normal_cdf(x, marginal_of(mu, sigma));
  });
}

levex_status levex_normal_sf(double x, double mu, double sigma, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = levex::normal_sf(x, marginal_of(mu, sigma));
  });
}

levex_status levex_normal_quantile(double p, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = levex::normal_quantile(p);
  });
}

levex_status levex_bessel_j0(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = levex::bessel_j0(x);
  });
}

levex_status levex_joint_exceedance(double u, double rho, double mu, double sigma, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = levex::joint_exceedance(u, rho, marginal_of(mu, sigma));
  });
}

levex_status levex_target_functional(const double* levels, size_t k, double rho, double mu,
                                     double sigma, double* out) {
  return guarded([&] {
    need(out, "out");
    if (k > 0) need(levels, "levels");
    *out = levex::target_functional({levels, k}, rho, marginal_of(mu, sigma));
  });
}

levex_status levex_expected_error(double rho, const double* levels, size_t k, double mu,
                                  double sigma, double window_volume, double* out) {
  return guarded([&] {
    need(out, "out");
    need(levels, "levels");
    const levex::ExcursionLevels lv(std::vector<double>(levels, levels + k));
    *out = levex::expected_error_decomposition(rho, lv, marginal_of(mu, sigma), window_volume);
  });
}

levex_status levex_config_parse(const char* json, levex_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new levex_config{levex::parse_config(json)};
  });
}

levex_status levex_config_load(const char* path, levex_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const std::string text = levex::csv::read_file(path);
    *out = new levex_config{levex::parse_config(text)};
  });
}

void levex_config_free(levex_config* config) { delete config; }

levex_status levex_config_set_levels(levex_config* config, const char* csv) {
  return guarded([&] {
    need(config, "config");
    need(csv, "csv");
    config->cfg.levels = levex::parse_level_list(csv);
  });
}

levex_status levex_config_set_methods(levex_config* config, const char* csv) {
  return guarded([&] {
    need(config, "config");
    need(csv, "csv");
    try {
      config->cfg.methods = levex::parse_method_list(csv);
    } catch (const levex::Error& e) {
      levex::fail(levex::ErrorCode::Config, e.what());
    }
  });
}

levex_status levex_config_set_seed(levex_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->cfg.seed = seed;
  });
}

levex_status levex_config_set_threads(levex_config* config, unsigned threads) {
  return guarded([&] {
    need(config, "config");
    config->cfg.threads = threads;
  });
}

levex_status levex_config_seed(const levex_config* config, uint64_t* out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = config->cfg.seed;
  });
}

levex_status levex_config_to_json(const levex_config* config, char** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = copy_string(levex::config_to_json(config->cfg));
  });
}

levex_status levex_model_create(const char* kind, double sigma2, double length_scale,
                                levex_model** out) {
  return guarded([&] {
    need(kind, "kind");
    need(out, "out");
    *out = new levex_model{
        levex::CovarianceModel(levex::covariance_kind_from_string(kind), sigma2, length_scale)};
  });
}

levex_status levex_model_from_config(const levex_config* config, levex_model** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = new levex_model{config->cfg.require_model()};
  });
}

void levex_model_free(levex_model* model) { delete model; }

levex_status levex_model_eval(const levex_model* model, const double* lag, size_t d,
                              double* out) {
  return guarded([&] {
    need(model, "model");
    need(lag, "lag");
    need(out, "out");
    *out = model->model({lag, d});
  });
}

levex_status levex_observations_create(const double* points, const double* values, size_t n,
                                       size_t d, levex_observations** out) {
  return guarded([&] {
    need(points, "points");
    need(values, "values");
    need(out, "out");
    if (n == 0 || d == 0) levex::fail(levex::ErrorCode::InvalidArgument, "empty observation set");
    levex::PointMatrix p = Eigen::Map<const levex::PointMatrix>(
        points, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values, static_cast<Eigen::Index>(n));
    *out = new levex_observations{levex::ObservationSet(std::move(p), std::move(v))};
  });
}

levex_status levex_observations_read_csv(const char* path, levex_observations** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new levex_observations{levex::csv::parse_observations(levex::csv::read_file(path))};
  });
}

void levex_observations_free(levex_observations* obs) { delete obs; }

size_t levex_observations_size(const levex_observations* obs) {
  return obs == nullptr ? 0 : obs->obs.size();
}

levex_status levex_weights(const levex_model* model, const levex_observations* obs,
                           const char* method, const double* t, size_t d, double* lambda,
                           double* objective, int* degenerate) {
  return guarded([&] {
    need(model, "model");
    need(obs, "observations");
    need(method, "method");
    need(t, "t");
    need(lambda, "lambda");
    if (d != obs->obs.dim()) levex::fail(levex::ErrorCode::InvalidArgument, "dimension mismatch");
    const auto system = levex::build_sigma(model->model, obs->obs);
    const auto w = levex::weights_at(levex::method_from_string(method), model->model, obs->obs,
                                     system, {t, d});
    for (Eigen::Index j = 0; j < w.lambda.size(); ++j) lambda[j] = w.lambda[j];
    if (objective) *objective = w.objective;
    if (degenerate) *degenerate = w.degenerate() ? 1 : 0;
  });
}

levex_status levex_predict_point(const levex_model* model, const levex_observations* obs,
                                 const char* method, double mu, const double* t, size_t d,
                                 double* prediction, double* mse) {
  return guarded([&] {
    need(model, "model");
    need(obs, "observations");
    need(method, "method");
    need(t, "t");
    need(prediction, "prediction");
    if (d != obs->obs.dim()) levex::fail(levex::ErrorCode::InvalidArgument, "dimension mismatch");
    const levex::Method m = levex::method_from_string(method);
    const auto system = levex::build_sigma(model->model, obs->obs);
    const Eigen::VectorXd ct = levex::build_ct(model->model, obs->obs, {t, d});
    const auto w = levex::compute_weights(m, system, ct, model->model.sigma2(),
                                          obs->obs.nearest({t, d}));
    *prediction = levex::predict(w, obs->obs.values(), mu);
    if (mse) *mse = levex::mse(m, levex::b_quantities(system, ct), model->model.sigma2());
  });
}

levex_status levex_simulate(const levex_config* config, levex_path** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    const auto& cfg = config->cfg;
    const auto grid = eval_grid_of(cfg);
    *out = new levex_path{levex::simulate_path(cfg.require_model(), cfg.marginal, grid,
                                               levex::replication_seed(cfg.seed, 0))};
  });
}

levex_status levex_path_read_csv(const char* path, levex_path** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new levex_path{levex::csv::parse_path(levex::csv::read_file(path))};
  });
}

levex_status levex_path_write_csv(const levex_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    levex::csv::write_file_atomic(file, levex::csv::path_to_csv(path->path));
  });
}

void levex_path_free(levex_path* path) { delete path; }

size_t levex_path_size(const levex_path* path) { return path == nullptr ? 0 : path->path.grid.size(); }

size_t levex_path_dim(const levex_path* path) { return path == nullptr ? 0 : path->path.grid.dim(); }

levex_status levex_path_point(const levex_path* path, size_t i, double* coords, double* value) {
  return guarded([&] {
    need(path, "path");
    if (i >= path->path.grid.size()) levex::fail(levex::ErrorCode::InvalidArgument, "index out of range");
    if (coords) {
      auto p = path->path.grid.point(i);
      std::copy(p.begin(), p.end(), coords);
    }
    if (value) *value = path->path.values[static_cast<Eigen::Index>(i)];
  });
}

levex_status levex_sym_diff(const levex_path* a, const levex_path* b, double level, double* out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = levex::symmetric_difference_volume(a->path, b->path, level);
  });
}

levex_status levex_predict_grid(const levex_config* config, const levex_observations* obs,
                                levex_prediction** out) {
  return guarded([&] {
    need(config, "config");
    need(obs, "observations");
    need(out, "out");
    const auto& cfg = config->cfg;
    *out = new levex_prediction{
        levex::predict_grid(cfg.require_model(), cfg.marginal, obs->obs, eval_grid_of(cfg), cfg.methods)};
  });
}

levex_status levex_prediction_write_csv(const levex_prediction* table, const char* file) {
  return guarded([&] {
    need(table, "table");
    need(file, "file");
    levex::csv::write_file_atomic(file, levex::csv::predictions_to_csv(table->table));
  });
}

size_t levex_prediction_rows(const levex_prediction* table) {
  return table == nullptr ? 0 : table->table.rows.size();
}

void levex_prediction_free(levex_prediction* table) { delete table; }

levex_status levex_evaluate_files(const char* true_csv, const char* predicted_csv,
                                  const char* levels_csv, levex_evaluation** out) {
  return guarded([&] {
    need(true_csv, "true_csv");
    need(predicted_csv, "predicted_csv");
    need(levels_csv, "levels_csv");
    need(out, "out");
    const levex::ExcursionLevels levels(levex::parse_level_list(levels_csv));
    const auto truth = levex::csv::parse_path(levex::csv::read_file(true_csv));
    const auto series = levex::csv::parse_prediction_series(levex::csv::read_file(predicted_csv));
    auto eval = std::make_unique<levex_evaluation>();
    for (const auto& [name, path] : series) {
      const auto report = levex::error_report(truth, path, levels);
      eval->names.push_back(name);
      eval->totals.push_back(report.total);
      for (const auto& [u, v] : report.per_level) eval->rows.push_back({0, name, u, v});
    }
    *out = eval.release();
  });
}

size_t levex_evaluation_series(const levex_evaluation* eval) {
  return eval == nullptr ? 0 : eval->names.size();
}

const char* levex_evaluation_series_name(const levex_evaluation* eval, size_t i) {
  if (eval == nullptr || i >= eval->names.size()) return nullptr;
  return eval->names[i].c_str();
}

levex_status levex_evaluation_total(const levex_evaluation* eval, size_t i, double* out) {
  return guarded([&] {
    need(eval, "eval");
    need(out, "out");
    if (i >= eval->totals.size()) levex::fail(levex::ErrorCode::InvalidArgument, "index out of range");
    *out = eval->totals[i];
  });
}

levex_status levex_evaluation_write_csv(const levex_evaluation* eval, const char* file) {
  return guarded([&] {
    need(eval, "eval");
    need(file, "file");
    levex::csv::write_file_atomic(file, levex::csv::evaluation_to_csv(eval->rows));
  });
}

void levex_evaluation_free(levex_evaluation* eval) { delete eval; }

levex_status levex_study_run(const levex_config* config, levex_study** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    levex::StudyConfig study = [&] {
      try {
        return levex::to_study_config(config->cfg);
      } catch (const levex::Error& e) {
        if (e.code() == levex::ErrorCode::InvalidArgument) levex::fail(levex::ErrorCode::Config, e.what());
        throw;
      }
    }();
    *out = new levex_study{levex::run_study(study)};
  });
}

levex_status levex_study_write(const levex_study* study, const char* dir) {
  return guarded([&] {
    need(study, "study");
    need(dir, "dir");
    const std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) levex::fail(levex::ErrorCode::Io, "cannot create directory " + root.string());
    const auto& r = study->report;
    // Render everything first so a formatting failure leaves no partial output.
    const std::string raw = levex::csv::study_raw_csv(r);
    const std::string summary = levex::csv::study_summary_csv(r);
    const std::string variance = levex::csv::study_variance_csv(r);
    const std::string curve = levex::csv::study_mse_curve_csv(r);
    levex::csv::write_file_atomic(root / "raw.csv", raw);
    levex::csv::write_file_atomic(root / "summary.csv", summary);
    levex::csv::write_file_atomic(root / "variance.csv", variance);
    levex::csv::write_file_atomic(root / "mse_curve.csv", curve);
  });
}

levex_status levex_study_median_error(const levex_study* study, const char* method, double level,
                                      double* out) {
  return guarded([&] {
    need(study, "study");
    need(method, "method");
    need(out, "out");
    const levex::Method m = levex::method_from_string(method);
    for (const auto& s : study->report.summaries) {
      if (s.method == m && s.level == level) {
        *out = s.stats.median;
        return;
      }
    }
    levex::fail(levex::ErrorCode::InvalidArgument, "no summary for that method and level");
  });
}

levex_status levex_study_median_variance(const levex_study* study, const char* series,
                                         double* out) {
  return guarded([&] {
    need(study, "study");
    need(series, "series");
    need(out, "out");
    auto it = study->report.variance_summaries.find(series);
    if (it == study->report.variance_summaries.end()) {
      levex::fail(levex::ErrorCode::InvalidArgument, std::string("no variance series ") + series);
    }
    *out = it->second.median;
  });
}

levex_status levex_study_exactness(const levex_study* study, double* out) {
  return guarded([&] {
    need(study, "study");
    need(out, "out");
    *out = study->report.exactness_max_deviation;
  });
}

levex_status levex_study_ridge(const levex_study* study, double* observations, double* simulation) {
  return guarded([&] {
    need(study, "study");
    need(observations, "observations");
    need(simulation, "simulation");
    *observations = study->report.observation_ridge;
    *simulation = study->report.simulation_ridge;
  });
}

void levex_study_free(levex_study* study) { delete study; }

levex_status levex_consistency(const levex_config* config, const double* t, size_t d,
                               const double* meshes, size_t count, size_t replications,
                               double* analytical, double* holder_bound, double* empirical) {
  return guarded([&] {
    need(config, "config");
    need(t, "t");
    need(meshes, "meshes");
    need(analytical, "analytical");
    need(holder_bound, "holder_bound");
    const auto& cfg = config->cfg;
    const auto result = levex::consistency_experiment(cfg.require_model(), cfg.marginal,
                                                      cfg.require_window(), {t, d},
                                                      {meshes, count}, cfg.seed, replications);
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      analytical[i] = result.points[i].analytical_mse;
      holder_bound[i] = result.points[i].holder_bound;
      if (empirical) empirical[i] = result.points[i].empirical_mse;
    }
  });
}

}  // extern "C"
