// levex command-line front end. Links only the C interface.
//
// Exit codes: 0 ok, 1 I/O or internal error, 2 configuration / usage error,
// 3 numerical failure, 4 duplicate observation location, 5 grid mismatch.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levex/levex.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(levex_status s) {
  switch (s) {
    case LEVEX_OK: return 0;
    case LEVEX_E_INVALID:
    case LEVEX_E_CONFIG:
    case LEVEX_E_DOMAIN: return 2;
    case LEVEX_E_NUMERICAL: return 3;
    case LEVEX_E_DUPLICATE: return 4;
    case LEVEX_E_GRID: return 5;
    default: return 1;
  }
}

void check(levex_status s) {
  if (s != LEVEX_OK) throw CliError{exit_code_for(s), levex_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Config = Handle<levex_config, levex_config_free>;
using Path = Handle<levex_path, levex_path_free>;
using Observations = Handle<levex_observations, levex_observations_free>;
using Prediction = Handle<levex_prediction, levex_prediction_free>;
using Evaluation = Handle<levex_evaluation, levex_evaluation_free>;
using Study = Handle<levex_study, levex_study_free>;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Overrides {
  std::optional<std::string> levels;
  std::optional<std::string> methods;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void load_config(Config& cfg, const std::string& path, const Overrides& o) {
  check(levex_config_load(path.c_str(), cfg.out()));
  if (o.levels) check(levex_config_set_levels(cfg.get(), o.levels->c_str()));
  if (o.methods) check(levex_config_set_methods(cfg.get(), o.methods->c_str()));
  if (o.seed) check(levex_config_set_seed(cfg.get(), *o.seed));
  if (o.threads) check(levex_config_set_threads(cfg.get(), *o.threads));
}

json config_echo(const Config& cfg) {
  char* text = nullptr;
  check(levex_config_to_json(cfg.get(), &text));
  json j = json::parse(text);
  levex_string_free(text);
  return j;
}

// Written last; if it fails the command's outputs are removed again.
void write_manifest(const fs::path& file, const std::string& command, const Config* cfg,
                    const json& inputs, const std::string& started,
                    const std::vector<fs::path>& outputs, const json& extra = nullptr) {
  json m;
  m["tool_version"] = levex_version();
  m["command"] = command;
  if (cfg != nullptr) {
    m["config"] = config_echo(*cfg);
    std::uint64_t seed = 0;
    check(levex_config_seed(cfg->get(), &seed));
    m["master_seed"] = seed;
  }
  if (!inputs.is_null()) m["inputs"] = inputs;
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  json outs = json::array();
  for (const auto& p : outputs) outs.push_back(p.filename().string());
  m["outputs"] = outs;
  if (extra.is_object()) m.update(extra);

  const fs::path tmp = fs::path(file) += ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  out << m.dump(2) << '\n';
  out.close();
  std::error_code ec;
  if (out.fail()) {
    ec = std::make_error_code(std::errc::io_error);
  } else {
    fs::rename(tmp, file, ec);
  }
  if (ec) {
    fs::remove(tmp, ec);
    for (const auto& p : outputs) fs::remove(p, ec);
    throw CliError{1, "cannot write manifest " + file.string()};
  }
}

fs::path manifest_for(const fs::path& out) { return fs::path(out) += ".manifest.json"; }

int run_simulate(const std::string& config_path, const std::string& out, const Overrides& o) {
  const std::string started = utc_now();
  Config cfg;
  load_config(cfg, config_path, o);
  Path path;
  check(levex_simulate(cfg.get(), path.out()));
  check(levex_path_write_csv(path.get(), out.c_str()));
  write_manifest(manifest_for(out), "simulate", &cfg, nullptr, started, {out});
  return 0;
}

int run_predict(const std::string& config_path, const std::string& obs_csv, const std::string& out,
                const Overrides& o) {
  const std::string started = utc_now();
  Config cfg;
  load_config(cfg, config_path, o);
  Observations obs;
  check(levex_observations_read_csv(obs_csv.c_str(), obs.out()));
  Prediction table;
  check(levex_predict_grid(cfg.get(), obs.get(), table.out()));
  check(levex_prediction_write_csv(table.get(), out.c_str()));
  write_manifest(manifest_for(out), "predict", &cfg, {{"observations", obs_csv}}, started, {out});
  return 0;
}

int run_evaluate(const std::string& true_csv, const std::string& pred_csv, const std::string& levels,
                 const std::string& out) {
  const std::string started = utc_now();
  Evaluation eval;
  check(levex_evaluate_files(true_csv.c_str(), pred_csv.c_str(), levels.c_str(), eval.out()));
  if (!out.empty()) {
    check(levex_evaluation_write_csv(eval.get(), out.c_str()));
    write_manifest(manifest_for(out), "evaluate", nullptr,
                   {{"true", true_csv}, {"predicted", pred_csv}, {"levels", levels}}, started, {out});
  }
  for (std::size_t i = 0; i < levex_evaluation_series(eval.get()); ++i) {
    double total = 0.0;
    check(levex_evaluation_total(eval.get(), i, &total));
    std::printf("%s %.17g\n", levex_evaluation_series_name(eval.get(), i), total);
  }
  return 0;
}

int run_study(const std::string& config_path, const std::string& out_dir, const Overrides& o) {
  const std::string started = utc_now();
  Config cfg;
  load_config(cfg, config_path, o);
  Study study;
  check(levex_study_run(cfg.get(), study.out()));
  check(levex_study_write(study.get(), out_dir.c_str()));
  double obs_ridge = 0.0, sim_ridge = 0.0;
  check(levex_study_ridge(study.get(), &obs_ridge, &sim_ridge));
  if (obs_ridge > 0.0 || sim_ridge > 0.0) {
    std::fprintf(stderr, "levex: ridge applied (observations %g, simulation %g)\n", obs_ridge,
                 sim_ridge);
  }
  const fs::path dir(out_dir);
  write_manifest(dir / "manifest.json", "study", &cfg, nullptr, started,
                 {dir / "raw.csv", dir / "summary.csv", dir / "variance.csv", dir / "mse_curve.csv"},
                 {{"ridge", {{"observations", obs_ridge}, {"simulation", sim_ridge}}}});
  return 0;
}

int run_orthant(double u, double rho, double mu, double sigma) {
  double p = 0.0;
  check(levex_joint_exceedance(u, rho, mu, sigma, &p));
  std::printf("%.15g\n", p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set extrapolation of Gaussian random fields"};
  app.set_version_flag("--version", std::string(levex_version()));
  app.require_subcommand(1);

  std::string config_path, out, obs_csv, true_csv, pred_csv;
  std::string levels = "-2,-1,0,1,2";
  Overrides o;
  std::string levels_override, methods_override;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double u = 0.0, rho = 0.0, mu = 0.0, sigma = 1.0;

  auto add_overrides = [&](CLI::App* cmd, bool with_threads) {
    cmd->add_option("--levels", levels_override, "comma-separated excursion levels");
    cmd->add_option("--methods", methods_override, "comma-separated predictor names");
    cmd->add_option("--seed", seed, "master seed (overrides the config)");
    if (with_threads) cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
  };

  auto* sim = app.add_subcommand("simulate", "sample a field path on the evaluation grid");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--out", out, "path CSV")->required();
  add_overrides(sim, false);

  auto* pred = app.add_subcommand("predict", "predict on the evaluation grid from observations");
  pred->add_option("observations", obs_csv, "observation CSV t_1..t_d,value")->required();
  pred->add_option("--config", config_path)->required();
  pred->add_option("--out", out, "prediction CSV")->required();
  add_overrides(pred, false);

  auto* eval = app.add_subcommand("evaluate", "excursion-set errors between two CSVs");
  eval->add_option("true", true_csv, "true path CSV")->required();
  eval->add_option("predicted", pred_csv, "path or prediction CSV")->required();
  eval->add_option("--levels", levels, "comma-separated excursion levels");
  eval->add_option("--out", out, "per-level CSV");

  auto* study = app.add_subcommand("study", "replicated simulation study");
  study->add_option("--config", config_path)->required();
  study->add_option("--out", out, "output directory")->required();
  add_overrides(study, true);

  auto* orth = app.add_subcommand("orthant", "P(X > u, Xhat > u) for correlation rho");
  orth->add_option("--u", u)->required();
  orth->add_option("--rho", rho)->required();
  orth->add_option("--mu", mu);
  orth->add_option("--sigma", sigma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (CLI::App* cmd : {sim, pred, study}) {
    if (!cmd->parsed()) continue;
    if (cmd->count("--levels")) o.levels = levels_override;
    if (cmd->count("--methods")) o.methods = methods_override;
    if (cmd->count("--seed")) o.seed = seed;
    if (cmd->get_option_no_throw("--threads") && cmd->count("--threads")) o.threads = threads;
  }

  try {
    if (sim->parsed()) return run_simulate(config_path, out, o);
    if (pred->parsed()) return run_predict(config_path, obs_csv, out, o);
    if (eval->parsed()) return run_evaluate(true_csv, pred_csv, levels, out);
    if (study->parsed()) return run_study(config_path, out, o);
    if (orth->parsed()) return run_orthant(u, rho, mu, sigma);
  } catch (const CliError& e) {
    std::cerr << "levex: " << e.message << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "levex: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
