#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levex/covariance.hpp"
#include "levex/predictors.hpp"
#include "levex/special_fn.hpp"
#include "levex/study.hpp"

namespace levex {

/// Resolved run configuration shared by every CLI command. Fields a command
/// does not need may stay unset.
///
/// JSON schema (unknown keys are rejected):
///   model        {"kind", "sigma2"=1, "length_scale"=1, "table"=[[lag, C], ...],
///                 "holder_K", "holder_alpha"}                         required
///   marginal     {"mu"=0, "sigma"=sqrt(sigma2)}
///   window       {"lo": [..], "hi": [..]}
///   obs_mesh, eval_mesh   positive numbers
///   levels       [numbers]                 default [-2, -1, 0, 1, 2]
///   methods      [names]                   default all four
///   replications positive integer          default 1
///   seed         unsigned 64-bit integer   default 0
///   threads      unsigned integer          default 0 (hardware)
/// A manifest written by the CLI is accepted too: its "config" member is used.
struct RunConfig {
  std::optional<CovarianceModel> model;
  GaussianMarginal marginal;
  std::optional<Window> window;
  std::optional<double> obs_mesh;
  std::optional<double> eval_mesh;
  std::vector<double> levels{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  const CovarianceModel& require_model() const;
  const Window& require_window() const;
  double require_eval_mesh() const;
  double require_obs_mesh() const;
};

/// Throws ErrorCode::Config on malformed JSON or schema violations.
RunConfig parse_config(const std::string& json_text);

/// Canonical JSON of the resolved configuration (defaults filled in).
std::string config_to_json(const RunConfig& config);

/// Sorted, duplicate-free level list; throws ErrorCode::Config otherwise.
std::vector<double> normalize_levels(std::vector<double> levels);

/// Parses "a,b,c" into numbers / method names.
std::vector<double> parse_level_list(const std::string& csv);
std::vector<Method> parse_method_list(const std::string& csv);

StudyConfig to_study_config(const RunConfig& config);

}  // namespace levex
