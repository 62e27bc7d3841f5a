#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "levex/covariance.hpp"
#include "levex/excursion.hpp"
#include "levex/simulate.hpp"
#include "levex/study.hpp"

namespace levex::csv {

// Numbers are printed with 17 significant digits ("%.17g", C locale),
// rows end with '\n'.
std::string format_double(double x);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Points and values of a `t_1,...,t_d,value` table.
struct PointTable {
  PointMatrix points;
  Eigen::VectorXd values;
};

PointTable parse_point_table(const std::string& text);

std::string path_to_csv(const FieldPath& path);

/// Reads a path CSV back; the lattice is reconstructed from the points.
FieldPath parse_path(const std::string& text, const GaussianMarginal& marginal = {});

/// Observation CSV (same layout as a path). Throws ErrorCode::DuplicateLocation
/// when a location repeats.
ObservationSet parse_observations(const std::string& text);

std::string predictions_to_csv(const PredictionTable& table);

/// Splits a prediction CSV into one path per method, in order of first
/// appearance. A plain path CSV yields the single series "path".
std::vector<std::pair<std::string, FieldPath>> parse_prediction_series(const std::string& text);

/// Rows `replication,method,level,sym_diff`.
struct EvaluationRow {
  std::size_t replication;
  std::string method;
  double level;
  double sym_diff;
};

std::string evaluation_to_csv(const std::vector<EvaluationRow>& rows);

std::string study_raw_csv(const StudyReport& report);
std::string study_summary_csv(const StudyReport& report);
std::string study_variance_csv(const StudyReport& report);
/// Columns t_1..t_d, then one analytical MSE column per method.
std::string study_mse_curve_csv(const StudyReport& report);

}  // namespace levex::csv
