#ifndef LEVEX_LEVEX_H
#define LEVEX_LEVEX_H

/* C interface of the levex library. All objects are opaque handles created
 * by a *_create / *_read / *_run function and released by the matching
 * *_free (which accepts NULL). Functions return a status; on failure the
 * message is available from levex_last_error() on the same thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LEVEX_BUILDING_LIBRARY)
#    define LEVEX_API __declspec(dllexport)
#  else
#    define LEVEX_API __declspec(dllimport)
#  endif
#else
#  define LEVEX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum levex_status {
  LEVEX_OK = 0,
  LEVEX_E_INVALID = 1,
  LEVEX_E_CONFIG = 2,
  LEVEX_E_NUMERICAL = 3,
  LEVEX_E_DUPLICATE = 4,
  LEVEX_E_GRID = 5,
  LEVEX_E_IO = 6,
  LEVEX_E_DOMAIN = 7,
  LEVEX_E_INTERNAL = 99
} levex_status;

typedef struct levex_config levex_config;
typedef struct levex_model levex_model;
typedef struct levex_observations levex_observations;
typedef struct levex_path levex_path;
typedef struct levex_prediction levex_prediction;
typedef struct levex_evaluation levex_evaluation;
typedef struct levex_study levex_study;

LEVEX_API const char* levex_version(void);
LEVEX_API const char* levex_last_error(void);
LEVEX_API const char* levex_status_name(levex_status status);
/* Releases strings returned through char** out-parameters. */
LEVEX_API void levex_string_free(char* s);

/* ---- special functions ---- */
LEVEX_API levex_status levex_normal_cdf(double x, double mu, double sigma, double* out);
LEVEX_API levex_status levex_normal_sf(double x, double mu, double sigma, double* out);
LEVEX_API levex_status levex_normal_quantile(double p, double* out);
LEVEX_API levex_status levex_bessel_j0(double x, double* out);
/* P(X > u, Y > u), common N(mu, sigma^2) marginal, correlation rho. */
LEVEX_API levex_status levex_joint_exceedance(double u, double rho, double mu, double sigma,
                                              double* out);
LEVEX_API levex_status levex_target_functional(const double* levels, size_t k, double rho,
                                               double mu, double sigma, double* out);
LEVEX_API levex_status levex_expected_error(double rho, const double* levels, size_t k,
                                            double mu, double sigma, double window_volume,
                                            double* out);

/* ---- configuration ---- */
LEVEX_API levex_status levex_config_parse(const char* json, levex_config** out);
LEVEX_API levex_status levex_config_load(const char* path, levex_config** out);
LEVEX_API void levex_config_free(levex_config* config);
/* Comma-separated overrides, e.g. "-2,-1,0,1,2" and "simple_kriging,ordinary_kriging". */
LEVEX_API levex_status levex_config_set_levels(levex_config* config, const char* csv);
LEVEX_API levex_status levex_config_set_methods(levex_config* config, const char* csv);
LEVEX_API levex_status levex_config_set_seed(levex_config* config, uint64_t seed);
LEVEX_API levex_status levex_config_set_threads(levex_config* config, unsigned threads);
LEVEX_API levex_status levex_config_seed(const levex_config* config, uint64_t* out);
/* Canonical JSON with every default filled in. */
LEVEX_API levex_status levex_config_to_json(const levex_config* config, char** out);

/* ---- covariance models ---- */
/* kind: exponential, gaussian, bessel_j0, sinc. */
LEVEX_API levex_status levex_model_create(const char* kind, double sigma2, double length_scale,
                                          levex_model** out);
LEVEX_API levex_status levex_model_from_config(const levex_config* config, levex_model** out);
LEVEX_API void levex_model_free(levex_model* model);
LEVEX_API levex_status levex_model_eval(const levex_model* model, const double* lag, size_t d,
                                        double* out);

/* ---- observations ---- */
/* points: n rows of d coordinates, row-major. */
LEVEX_API levex_status levex_observations_create(const double* points, const double* values,
                                                 size_t n, size_t d, levex_observations** out);
LEVEX_API levex_status levex_observations_read_csv(const char* path, levex_observations** out);
LEVEX_API void levex_observations_free(levex_observations* obs);
LEVEX_API size_t levex_observations_size(const levex_observations* obs);

/* ---- predictors ----
 * method: levelset_unknown_mean, levelset_known_mean, simple_kriging,
 * ordinary_kriging. lambda must hold levex_observations_size() entries.
 * degenerate is set to 1 when a fallback weight vector was returned. */
LEVEX_API levex_status levex_weights(const levex_model* model, const levex_observations* obs,
                                     const char* method, const double* t, size_t d,
                                     double* lambda, double* objective, int* degenerate);
LEVEX_API levex_status levex_predict_point(const levex_model* model,
                                           const levex_observations* obs, const char* method,
                                           double mu, const double* t, size_t d,
                                           double* prediction, double* mse);

/* ---- paths ---- */
/* Samples the field on the evaluation grid (window, eval_mesh) of the config
 * with the stream seed of replication 0 under the config seed. */
LEVEX_API levex_status levex_simulate(const levex_config* config, levex_path** out);
LEVEX_API levex_status levex_path_read_csv(const char* path, levex_path** out);
LEVEX_API levex_status levex_path_write_csv(const levex_path* path, const char* file);
LEVEX_API void levex_path_free(levex_path* path);
LEVEX_API size_t levex_path_size(const levex_path* path);
LEVEX_API size_t levex_path_dim(const levex_path* path);
LEVEX_API levex_status levex_path_point(const levex_path* path, size_t i, double* coords,
                                        double* value);
LEVEX_API levex_status levex_sym_diff(const levex_path* a, const levex_path* b, double level,
                                      double* out);

/* ---- grid predictions ---- */
LEVEX_API levex_status levex_predict_grid(const levex_config* config,
                                          const levex_observations* obs,
                                          levex_prediction** out);
LEVEX_API levex_status levex_prediction_write_csv(const levex_prediction* table,
                                                  const char* file);
LEVEX_API size_t levex_prediction_rows(const levex_prediction* table);
LEVEX_API void levex_prediction_free(levex_prediction* table);

/* ---- evaluation of CSV outputs ---- */
/* predicted_csv may be a path CSV or a prediction CSV (one series per method). */
LEVEX_API levex_status levex_evaluate_files(const char* true_csv, const char* predicted_csv,
                                            const char* levels_csv, levex_evaluation** out);
LEVEX_API size_t levex_evaluation_series(const levex_evaluation* eval);
LEVEX_API const char* levex_evaluation_series_name(const levex_evaluation* eval, size_t i);
LEVEX_API levex_status levex_evaluation_total(const levex_evaluation* eval, size_t i,
                                              double* out);
LEVEX_API levex_status levex_evaluation_write_csv(const levex_evaluation* eval, const char* file);
LEVEX_API void levex_evaluation_free(levex_evaluation* eval);

/* ---- simulation study ---- */
LEVEX_API levex_status levex_study_run(const levex_config* config, levex_study** out);
/* Writes raw.csv, summary.csv, variance.csv and mse_curve.csv into dir. */
LEVEX_API levex_status levex_study_write(const levex_study* study, const char* dir);
LEVEX_API levex_status levex_study_median_error(const levex_study* study, const char* method,
                                                double level, double* out);
/* series: a method name or "truth". */
LEVEX_API levex_status levex_study_median_variance(const levex_study* study, const char* series,
                                                   double* out);
LEVEX_API levex_status levex_study_exactness(const levex_study* study, double* out);
/* Ridge added to the observation and simulation covariance matrices (0 if none). */
LEVEX_API levex_status levex_study_ridge(const levex_study* study, double* observations,
                                         double* simulation);
LEVEX_API void levex_study_free(levex_study* study);

/* ---- consistency ---- */
/* For each mesh: analytical MSE at t, Hoelder bound and Monte-Carlo MSE.
 * Output arrays hold `count` entries; empirical may be NULL. */
LEVEX_API levex_status levex_consistency(const levex_config* config, const double* t, size_t d,
                                         const double* meshes, size_t count,
                                         size_t replications, double* analytical,
                                         double* holder_bound, double* empirical);

#ifdef __cplusplus
}
#endif

#endif
