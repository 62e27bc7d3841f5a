#include "levex/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "levex/error.hpp"

namespace levex::csv {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) fail(ErrorCode::InvalidArgument, "CSV is empty");
  return lines;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  double x = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    fail(ErrorCode::InvalidArgument,
         "CSV line " + std::to_string(line_no) + ": cannot parse number '" + cell + "'");
  }
  return x;
}

// Number of leading t_i columns in a header.
std::size_t coordinate_columns(const std::vector<std::string>& header) {
  std::size_t d = 0;
  while (d < header.size() && header[d] == "t_" + std::to_string(d + 1)) ++d;
  if (d == 0) fail(ErrorCode::InvalidArgument, "CSV header must start with t_1");
  return d;
}

std::string coordinate_header(std::size_t d) {
  std::string h;
  for (std::size_t i = 0; i < d; ++i) h += "t_" + std::to_string(i + 1) + ",";
  return h;
}

void append_point(std::string& out, std::span<const double> p) {
  for (double x : p) {
    out += format_double(x);
    out += ',';
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot move output into place: " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PointTable parse_point_table(const std::string& text) {
  const auto lines = lines_of(text);
  const auto header = split_line(lines[0]);
  const std::size_t d = coordinate_columns(header);
  if (header.size() != d + 1 || header[d] != "value") {
    fail(ErrorCode::InvalidArgument, "expected header t_1,...,t_d,value");
  }
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  if (rows == 0) fail(ErrorCode::InvalidArgument, "CSV has no data rows");
  PointTable table{PointMatrix(rows, static_cast<Eigen::Index>(d)), Eigen::VectorXd(rows)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto line_no = static_cast<std::size_t>(r) + 2;
    const auto cells = split_line(lines[static_cast<std::size_t>(r) + 1]);
    if (cells.size() != d + 1) {
      fail(ErrorCode::InvalidArgument, "CSV line " + std::to_string(line_no) + ": wrong column count");
    }
    for (std::size_t i = 0; i < d; ++i) {
      table.points(r, static_cast<Eigen::Index>(i)) = parse_number(cells[i], line_no);
    }
    table.values[r] = parse_number(cells[d], line_no);
  }
  return table;
}

std::string path_to_csv(const FieldPath& path) {
  std::string out = coordinate_header(path.grid.dim()) + "value\n";
  for (std::size_t i = 0; i < path.grid.size(); ++i) {
    append_point(out, path.grid.point(i));
    out += format_double(path.values[static_cast<Eigen::Index>(i)]);
    out += '\n';
  }
  return out;
}

FieldPath parse_path(const std::string& text, const GaussianMarginal& marginal) {
  PointTable table = parse_point_table(text);
  FieldPath path;
  path.grid = GridSpec::from_points(std::move(table.points));
  path.values = std::move(table.values);
  path.marginal = marginal;
  return path;
}

ObservationSet parse_observations(const std::string& text) {
  PointTable table = parse_point_table(text);
  return ObservationSet(std::move(table.points), std::move(table.values));
}

std::string predictions_to_csv(const PredictionTable& table) {
  std::string out = coordinate_header(table.grid.dim()) + "method,prediction,objective,mse,degenerate\n";
  for (const auto& row : table.rows) {
    append_point(out, table.grid.point(row.point));
    out += to_string(row.method);
    out += ',' + format_double(row.prediction) + ',' + format_double(row.objective) + ',' +
           format_double(row.mse) + ',';
    out += row.degeneracy == Degeneracy::None ? "0" : "1";
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, FieldPath>> parse_prediction_series(const std::string& text) {
  const auto lines = lines_of(text);
  const auto header = split_line(lines[0]);
  const std::size_t d = coordinate_columns(header);
  if (header.size() == d + 1 && header[d] == "value") {
    return {{"path", parse_path(text)}};
  }
  if (header.size() != d + 5 || header[d] != "method" || header[d + 1] != "prediction") {
    fail(ErrorCode::InvalidArgument, "unrecognized CSV header: " + lines[0]);
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::vector<double>>> rows;  // method -> (coords..., value)
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split_line(lines[l]);
    if (cells.size() != d + 5) {
      fail(ErrorCode::InvalidArgument, "CSV line " + std::to_string(l + 1) + ": wrong column count");
    }
    const std::string& method = cells[d];
    if (!rows.contains(method)) order.push_back(method);
    std::vector<double> row;
    for (std::size_t i = 0; i < d; ++i) row.push_back(parse_number(cells[i], l + 1));
    row.push_back(parse_number(cells[d + 1], l + 1));
    rows[method].push_back(std::move(row));
  }
  if (order.empty()) fail(ErrorCode::InvalidArgument, "CSV has no data rows");

  std::vector<std::pair<std::string, FieldPath>> out;
  for (const auto& name : order) {
    const auto& r = rows[name];
    PointMatrix points(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(d));
    FieldPath path;
    path.values.resize(static_cast<Eigen::Index>(r.size()));
    for (std::size_t k = 0; k < r.size(); ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        points(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = r[k][i];
      }
      path.values[static_cast<Eigen::Index>(k)] = r[k][d];
    }
    path.grid = GridSpec::from_points(std::move(points));
    out.emplace_back(name, std::move(path));
  }
  return out;
}

std::string evaluation_to_csv(const std::vector<EvaluationRow>& rows) {
  std::string out = "replication,method,level,sym_diff\n";
  for (const auto& r : rows) {
    out += std::to_string(r.replication) + ',' + r.method + ',' + format_double(r.level) + ',' +
           format_double(r.sym_diff) + '\n';
  }
  return out;
}

std::string study_raw_csv(const StudyReport& report) {
  std::string out = "replication,method,level,sym_diff\n";
  for (const auto& r : report.raw) {
    out += std::to_string(r.replication) + ',';
    out += to_string(r.method);
    out += ',' + format_double(r.level) + ',' + format_double(r.sym_diff) + '\n';
  }
  return out;
}

std::string study_summary_csv(const StudyReport& report) {
  std::string out = "method,level,mean,q1,median,q3,min,max\n";
  for (const auto& s : report.summaries) {
    out += to_string(s.method);
    for (double x : {s.level, s.stats.mean, s.stats.q1, s.stats.median, s.stats.q3, s.stats.min,
                     s.stats.max}) {
      out += ',' + format_double(x);
    }
    out += '\n';
  }
  return out;
}

std::string study_variance_csv(const StudyReport& report) {
  std::string out = "method,replication,var_hat\n";
  for (const auto& v : report.variances) {
    out += v.series + ',' + std::to_string(v.replication) + ',' + format_double(v.var_hat) + '\n';
  }
  return out;
}

std::string study_mse_curve_csv(const StudyReport& report) {
  std::string out = coordinate_header(report.eval_grid.dim());
  bool first = true;
  for (const auto& [method, curve] : report.mse_curve) {
    if (!first) out += ',';
    out += "mse_";
    out += to_string(method);
    first = false;
  }
  out += '\n';
  for (std::size_t i = 0; i < report.eval_grid.size(); ++i) {
    append_point(out, report.eval_grid.point(i));
    first = true;
    for (const auto& [method, curve] : report.mse_curve) {
      if (!first) out += ',';
      out += format_double(curve[static_cast<Eigen::Index>(i)]);
      first = false;
    }
    out += '\n';
  }
  return out;
}

}  // namespace levex::csv
