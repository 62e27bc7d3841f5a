#include "levex/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "levex/error.hpp"

namespace levex {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { fail(ErrorCode::Config, what); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      schema_error("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) schema_error(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema_error(where + "." + key + " must be finite");
  return x;
}

double positive(const json& obj, const char* key, const std::string& where) {
  const double x = number(obj, key, where);
  if (!(x > 0.0)) schema_error(where + "." + key + " must be positive");
  return x;
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) schema_error(where + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

CovarianceModel parse_model(const json& m) {
  if (!m.is_object()) schema_error("model must be an object");
  reject_unknown_keys(m, {"kind", "sigma2", "length_scale", "table", "holder_K", "holder_alpha"},
                      "model");
  if (!m.contains("kind") || !m.at("kind").is_string()) schema_error("model.kind must be a string");
  const CovarianceKind kind = covariance_kind_from_string(m.at("kind").get<std::string>());
  const double length_scale = m.contains("length_scale") ? positive(m, "length_scale", "model") : 1.0;

  auto build = [&]() -> CovarianceModel {
    if (kind != CovarianceKind::UserTable) {
      if (m.contains("table")) schema_error("model.table is only valid for kind user_table");
      const double sigma2 = m.contains("sigma2") ? positive(m, "sigma2", "model") : 1.0;
      return CovarianceModel(kind, sigma2, length_scale);
    }
    if (!m.contains("table") || !m.at("table").is_array()) {
      schema_error("model.table must be an array of [lag, value] pairs");
    }
    CovarianceModel::Table table;
    for (const auto& row : m.at("table")) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
        schema_error("model.table must be an array of [lag, value] pairs");
      }
      table.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    auto model = CovarianceModel::from_table(std::move(table), length_scale);
    if (m.contains("sigma2") &&
        std::abs(positive(m, "sigma2", "model") - model.sigma2()) > 1e-12 * model.sigma2()) {
      schema_error("model.sigma2 disagrees with the table value at lag 0");
    }
    return model;
  };

  try {
    CovarianceModel model = build();
    if (m.contains("holder_K") || m.contains("holder_alpha")) {
      if (!m.contains("holder_K") || !m.contains("holder_alpha")) {
        schema_error("model.holder_K and model.holder_alpha must be given together");
      }
      model.set_holder(positive(m, "holder_K", "model"), positive(m, "holder_alpha", "model"));
    }
    return model;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    schema_error(std::string("model: ") + e.what());
  }
}

json model_to_json(const CovarianceModel& model) {
  json m;
  m["kind"] = std::string(to_string(model.kind()));
  m["sigma2"] = model.sigma2();
  m["length_scale"] = model.length_scale();
  if (model.kind() == CovarianceKind::UserTable) {
    json table = json::array();
    for (const auto& [lag, value] : model.table()) table.push_back({lag, value});
    m["table"] = table;
  }
  m["holder_K"] = model.holder_k();
  m["holder_alpha"] = model.holder_alpha();
  return m;
}

std::vector<std::string> split(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

const CovarianceModel& RunConfig::require_model() const {
  if (!model) schema_error("config lacks 'model'");
  return *model;
}

const Window& RunConfig::require_window() const {
  if (!window) schema_error("config lacks 'window'");
  return *window;
}

double RunConfig::require_eval_mesh() const {
  if (!eval_mesh) schema_error("config lacks 'eval_mesh'");
  return *eval_mesh;
}

double RunConfig::require_obs_mesh() const {
  if (!obs_mesh) schema_error("config lacks 'obs_mesh'");
  return *obs_mesh;
}

std::vector<double> normalize_levels(std::vector<double> levels) {
  if (levels.empty()) schema_error("levels must not be empty");
  for (double u : levels) {
    if (!std::isfinite(u)) schema_error("levels must be finite");
  }
  std::sort(levels.begin(), levels.end());
  if (std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    schema_error("levels must be distinct");
  }
  return levels;
}

std::vector<double> parse_level_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split(csv)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) schema_error("cannot parse level '" + item + "'");
    out.push_back(v);
  }
  return normalize_levels(std::move(out));
}

std::vector<Method> parse_method_list(const std::string& csv) {
  std::vector<Method> out;
  for (const auto& item : split(csv)) {
    const Method m = method_from_string(item);
    if (std::find(out.begin(), out.end(), m) != out.end()) {
      schema_error("method '" + item + "' listed twice");
    }
    out.push_back(m);
  }
  if (out.empty()) schema_error("methods must not be empty");
  return out;
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("tool_version")) {
    doc = doc.at("config");  // a run manifest
  }
  if (!doc.is_object()) schema_error("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"model", "marginal", "window", "obs_mesh", "eval_mesh", "levels", "methods",
                       "replications", "seed", "threads"},
                      "config");

  RunConfig cfg;
  try {
    if (!doc.contains("model")) schema_error("config lacks 'model'");
    cfg.model = parse_model(doc.at("model"));
    cfg.marginal.sigma = std::sqrt(cfg.model->sigma2());

    if (doc.contains("marginal")) {
      const json& mg = doc.at("marginal");
      if (!mg.is_object()) schema_error("marginal must be an object");
      reject_unknown_keys(mg, {"mu", "sigma"}, "marginal");
      if (mg.contains("mu")) cfg.marginal.mu = number(mg, "mu", "marginal");
      if (mg.contains("sigma")) {
        const double sigma = positive(mg, "sigma", "marginal");
        if (std::abs(sigma * sigma - cfg.model->sigma2()) > 1e-12 * cfg.model->sigma2()) {
          schema_error("marginal.sigma^2 must equal model.sigma2");
        }
      }
    }

    if (doc.contains("window")) {
      const json& w = doc.at("window");
      if (!w.is_object() || !w.contains("lo") || !w.contains("hi")) {
        schema_error("window must be an object with 'lo' and 'hi'");
      }
      reject_unknown_keys(w, {"lo", "hi"}, "window");
      try {
        cfg.window = Window(number_array(w.at("lo"), "window.lo"), number_array(w.at("hi"), "window.hi"));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        schema_error(std::string("window: ") + e.what());
      }
    }
    if (doc.contains("obs_mesh")) cfg.obs_mesh = positive(doc, "obs_mesh", "config");
    if (doc.contains("eval_mesh")) cfg.eval_mesh = positive(doc, "eval_mesh", "config");
    if (cfg.obs_mesh && cfg.eval_mesh && *cfg.eval_mesh > *cfg.obs_mesh) {
      schema_error("eval_mesh must not exceed obs_mesh");
    }
    if (doc.contains("levels")) cfg.levels = normalize_levels(number_array(doc.at("levels"), "levels"));
    if (doc.contains("methods")) {
      const json& ms = doc.at("methods");
      if (!ms.is_array()) schema_error("methods must be an array of names");
      std::string joined;
      for (const auto& m : ms) {
        if (!m.is_string()) schema_error("methods must be an array of names");
        joined += (joined.empty() ? "" : ",") + m.get<std::string>();
      }
      cfg.methods = parse_method_list(joined);
    }
    if (doc.contains("replications")) {
      const json& r = doc.at("replications");
      if (!r.is_number_integer() || r.get<long long>() < 1) {
        schema_error("replications must be a positive integer");
      }
      cfg.replications = r.get<std::size_t>();
    }
    if (doc.contains("seed")) {
      const json& s = doc.at("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
        schema_error("seed must be a non-negative integer");
      }
      cfg.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("threads")) {
      const json& t = doc.at("threads");
      if (!t.is_number_integer() || t.get<long long>() < 0) {
        schema_error("threads must be a non-negative integer");
      }
      cfg.threads = t.get<unsigned>();
    }
  } catch (const json::exception& e) {
    schema_error(std::string("config: ") + e.what());
  }
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  json doc;
  if (cfg.model) doc["model"] = model_to_json(*cfg.model);
  doc["marginal"] = {{"mu", cfg.marginal.mu}, {"sigma", cfg.marginal.sigma}};
  if (cfg.window) doc["window"] = {{"lo", cfg.window->lo}, {"hi", cfg.window->hi}};
  if (cfg.obs_mesh) doc["obs_mesh"] = *cfg.obs_mesh;
  if (cfg.eval_mesh) doc["eval_mesh"] = *cfg.eval_mesh;
  doc["levels"] = cfg.levels;
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(std::string(to_string(m)));
  doc["methods"] = methods;
  doc["replications"] = cfg.replications;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  return doc.dump(2);
}

StudyConfig to_study_config(const RunConfig& cfg) {
  StudyConfig study{
      .model = cfg.require_model(),
      .marginal = cfg.marginal,
      .window = cfg.require_window(),
      .obs_mesh = cfg.require_obs_mesh(),
      .eval_mesh = cfg.require_eval_mesh(),
      .levels = ExcursionLevels(cfg.levels),
      .methods = cfg.methods,
      .replications = cfg.replications,
      .master_seed = cfg.seed,
      .threads = cfg.threads,
  };
  study.validate();
  return study;
}

}  // namespace levex
