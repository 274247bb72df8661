// Command line front end: solve single trajectories, run convergence-rate
// tables, sample noise fields, and drive the verification suites.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracspde/cq_stepper.hpp"
#include "fracspde/experiments.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/verify.hpp"
#include "fracspde/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracspde;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  int workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out_dir = ".";
  bool paper_scale = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts, bool needs_config) {
  auto* cfg = cmd->add_option("--config", opts.config_path, "JSON configuration file");
  if (needs_config) cfg->required();
  cmd->add_option("--seed", opts.seed_flag, "Seed override (highest precedence)");
  cmd->add_option("--workers", opts.workers, "Concurrent trajectory cap (1 = serial)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_flag("--paper-scale", opts.paper_scale,
                "Use the full-scale table parameters instead of the desk-scale defaults");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config: top level must be an object");
  return cfg;
}

double require_number(const json& obj, const std::string& section, const std::string& field) {
  if (!obj.contains(field)) throw ConfigError("config: missing field " + section + "." + field);
  if (!obj[field].is_number())
    throw ConfigError("config: field " + section + "." + field + " must be a number");
  return obj[field].get<double>();
}

int require_int(const json& obj, const std::string& section, const std::string& field,
                std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(field)) {
    if (fallback) return *fallback;
    throw ConfigError("config: missing field " + section + "." + field);
  }
  if (!obj[field].is_number_integer())
    throw ConfigError("config: field " + section + "." + field + " must be an integer");
  return obj[field].get<int>();
}

ProblemSpec parse_problem(const json& cfg) {
  if (!cfg.contains("problem") || !cfg["problem"].is_object())
    throw ConfigError("config: missing object 'problem'");
  const json& p = cfg["problem"];
  const double alpha = require_number(p, "problem", "alpha");
  const double h1 = require_number(p, "problem", "h1");
  const double h2 = require_number(p, "problem", "h2");
  const double beta = require_number(p, "problem", "beta");
  const double l = require_number(p, "problem", "l");
  const double T = require_number(p, "problem", "T");

  NonlinearSource f = NonlinearSource::zero();
  if (p.contains("source")) {
    if (!p["source"].is_object() || !p["source"].contains("id") || !p["source"]["id"].is_string())
      throw ConfigError("config: problem.source must be an object with a string 'id'");
    const double param = p["source"].value("param", 1.0);
    try {
      f = NonlinearSource::from_id(p["source"]["id"].get<std::string>(), param);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: problem.source.id: ") + e.what());
    }
  }
  try {
    return {alpha, HurstPair(h1, h2), beta, l, T, f};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: problem: ") + e.what());
  }
}

std::uint64_t resolve_seed(const CommonOptions& opts, const json& cfg) {
  if (opts.seed_flag) return *opts.seed_flag;
  if (const char* env = std::getenv("FRACSPDE_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ConfigError("FRACSPDE_SEED is not a valid unsigned integer");
    }
  }
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_integer() && !cfg["seed"].is_number_unsigned())
      throw ConfigError("config: field seed must be an integer");
    return cfg["seed"].get<std::uint64_t>();
  }
  return 42;
}

json problem_echo(const ProblemSpec& spec) {
  return json{{"alpha", spec.alpha},
              {"h1", spec.hurst.h1},
              {"h2", spec.hurst.h2},
              {"beta", spec.beta},
              {"l", spec.l},
              {"T", spec.T},
              {"source", {{"id", spec.f.id()}, {"param", spec.f.param()}}}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config_echo,
                    std::uint64_t seed, int workers, const std::vector<std::string>& outputs,
                    double wall_seconds) {
  json manifest{{"schema", "fracspde-manifest-v1"},
                {"command", command},
                {"version", kVersion},
                {"seed", seed},
                {"workers", workers},
                {"config", config_echo},
                {"outputs", outputs},
                {"wall_time_seconds", wall_seconds},
                {"created_unix", static_cast<std::int64_t>(std::time(nullptr))}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---- solve ----------------------------------------------------------------

int cmd_solve(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = load_config(opts.config_path);
  const ProblemSpec spec = parse_problem(cfg);
  if (!cfg.contains("grid") || !cfg["grid"].is_object())
    throw ConfigError("config: missing object 'grid'");
  const int m_t = require_int(cfg["grid"], "grid", "m_t");
  const int n_x = require_int(cfg["grid"], "grid", "n_x");
  const std::uint64_t seed = resolve_seed(opts, cfg);

  std::vector<int> snapshots;
  if (cfg.contains("snapshots")) {
    if (!cfg["snapshots"].is_array())
      throw ConfigError("config: field snapshots must be an array of step indices");
    for (const auto& v : cfg["snapshots"]) {
      if (!v.is_number_integer()) throw ConfigError("config: snapshots entries must be integers");
      snapshots.push_back(v.get<int>());
    }
  }

  const auto grid = [&] {
    try {
      return noise::NoiseGridSpec::from_domain(spec.T, spec.l, m_t, n_x);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: grid: ") + e.what());
    }
  }();
  const auto field = noise::sample_sheet_increments(grid, spec.hurst, seed);
  const auto result = [&] {
    try {
      return cq::run_trajectory(spec, m_t, n_x, field, snapshots);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();

  fs::create_directories(opts.out_dir);
  std::vector<std::string> outputs;

  auto dump_solution = [&](const fem::FemFunction& u, const std::string& name) {
    std::string text = "# n_x l T alpha h1 h2 beta seed\n# " + std::to_string(n_x) + " " +
                       fmt17(spec.l) + " " + fmt17(spec.T) + " " + fmt17(spec.alpha) + " " +
                       fmt17(spec.hurst.h1) + " " + fmt17(spec.hurst.h2) + " " +
                       fmt17(spec.beta) + " " + std::to_string(seed) + "\n";
    for (double v : u.coeffs) text += fmt17(v) + "\n";
    write_text(fs::path(opts.out_dir) / name, text);
    outputs.push_back(name);
  };
  dump_solution(result.final, "solution.csv");
  for (std::size_t s = 0; s < result.snapshots.size(); ++s)
    dump_solution(result.snapshots[s],
                  "solution_snapshot_" + std::to_string(result.snapshot_indices[s]) + ".csv");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json echo{{"problem", problem_echo(spec)}, {"grid", {{"m_t", m_t}, {"n_x", n_x}}}};
  if (!snapshots.empty()) echo["snapshots"] = snapshots;
  write_manifest(opts.out_dir, "solve", echo, seed, 1, outputs, wall);
  std::cout << "wrote " << outputs.size() << " solution file(s) to " << opts.out_dir << "\n";
  return kExitOk;
}

// ---- table ----------------------------------------------------------------

experiments::StudyConfig parse_study(const json& cfg, experiments::StudyMode mode,
                                     const CommonOptions& opts, std::uint64_t seed) {
  const ProblemSpec spec = parse_problem(cfg);
  json study = cfg.value("study", json::object());
  if (!study.is_object()) throw ConfigError("config: 'study' must be an object");

  experiments::StudyConfig config{spec, mode, 0, {}, seed, std::max(1, opts.workers)};

  auto int_list = [&](const std::string& field, std::vector<int> fallback) {
    if (!study.contains(field)) return fallback;
    if (!study[field].is_array())
      throw ConfigError("config: study." + field + " must be an array of integers");
    std::vector<int> out;
    for (const auto& v : study[field]) {
      if (!v.is_number_integer())
        throw ConfigError("config: study." + field + " must be an array of integers");
      out.push_back(v.get<int>());
    }
    return out;
  };

  if (mode == experiments::StudyMode::Temporal) {
    config.m = require_int(study, "study", "m", 100);
    const int n_x = require_int(study, "study", "n_x", 512);
    for (int m_t : int_list("levels_time", {16, 32, 64, 128})) config.levels.push_back({m_t, n_x});
    if (opts.paper_scale) config.m = 200;
  } else {
    config.m = require_int(study, "study", "m", 50);
    const int m_t = require_int(study, "study", "m_t", 1024);
    for (int n_x : int_list("levels_space", {8, 16, 32, 64})) config.levels.push_back({m_t, n_x});
    if (opts.paper_scale) {
      config.m = 100;
      for (auto& lvl : config.levels) lvl.m_t = 2048;
    }
  }
  if (study.contains("base_seed")) config.base_seed = study["base_seed"].get<std::uint64_t>();
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: study: ") + e.what());
  }
  return config;
}

int cmd_table(const std::string& mode_name, const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = load_config(opts.config_path);
  const experiments::StudyMode mode = mode_name == "temporal" ? experiments::StudyMode::Temporal
                                                              : experiments::StudyMode::Spatial;
  const std::uint64_t seed = resolve_seed(opts, cfg);

  const experiments::StudyConfig config = parse_study(cfg, mode, opts, seed);
  const experiments::RateTable table = [&] {
    try {
      return experiments::run_study(config);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();

  fs::create_directories(opts.out_dir);
  const std::string csv_name = "table_" + mode_name + ".csv";
  const std::string summary_name = "table_" + mode_name + "_summary.json";

  std::ostringstream csv;
  experiments::write_rate_table_csv(csv, table);
  write_text(fs::path(opts.out_dir) / csv_name, csv.str());

  json levels = json::array();
  for (const auto& lvl : table.levels) levels.push_back({{"m_t", lvl.m_t}, {"n_x", lvl.n_x}});
  const json summary{{"mode", mode_name},
                     {"problem", problem_echo(config.spec)},
                     {"m", config.m},
                     {"base_seed", config.base_seed},
                     {"levels", levels},
                     {"errors", table.errors},
                     {"rates", table.rates},
                     {"mean_rate", table.mean_rate},
                     {"theoretical_rate", table.theoretical_rate}};
  write_text(fs::path(opts.out_dir) / summary_name, summary.dump(2) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(opts.out_dir, "table " + mode_name, summary, seed, config.workers,
                 {csv_name, summary_name}, wall);

  std::cout << "mean rate " << table.mean_rate << " (theoretical " << table.theoretical_rate
            << "), errors";
  for (double e : table.errors) std::cout << ' ' << e;
  std::cout << "\n";
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const std::string& suite, const CommonOptions& opts) {
  verify::Report report;
  try {
    report = verify::run_suite(suite);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& check : report.checks)
    std::cout << (check.pass ? "[pass] " : "[FAIL] ") << check.name << " - " << check.detail
              << "\n";

  fs::create_directories(opts.out_dir);
  json checks = json::array();
  for (const auto& check : report.checks)
    checks.push_back({{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
  const json out{{"suite", report.suite}, {"passed", report.all_pass()}, {"checks", checks}};
  write_text(fs::path(opts.out_dir) / ("verify_" + suite + ".json"), out.dump(2) + "\n");

  return report.all_pass() ? kExitOk : kExitVerifyFailure;
}

// ---- sample-noise -----------------------------------------------------------

int cmd_sample_noise(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = load_config(opts.config_path);
  const ProblemSpec spec = parse_problem(cfg);
  if (!cfg.contains("grid") || !cfg["grid"].is_object())
    throw ConfigError("config: missing object 'grid'");
  const int m_t = require_int(cfg["grid"], "grid", "m_t");
  const int n_x = require_int(cfg["grid"], "grid", "n_x");
  const std::uint64_t seed = resolve_seed(opts, cfg);

  const auto grid = [&] {
    try {
      return noise::NoiseGridSpec::from_domain(spec.T, spec.l, m_t, n_x);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: grid: ") + e.what());
    }
  }();
  const auto field = noise::sample_sheet_increments(grid, spec.hurst, seed);

  fs::create_directories(opts.out_dir);
  std::ostringstream text;
  noise::write_field_csv(text, field);
  write_text(fs::path(opts.out_dir) / "field.csv", text.str());

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json echo{{"problem", problem_echo(spec)}, {"grid", {{"m_t", m_t}, {"n_x", n_x}}}};
  write_manifest(opts.out_dir, "sample-noise", echo, seed, 1, {"field.csv"}, wall);
  std::cout << "wrote field.csv (" << m_t << "x" << n_x << ") to " << opts.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and convergence-rate harness for the stochastic nonlinear "
               "time-fractional diffusion equation driven by fractional Brownian sheet noise"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions solve_opts, table_opts, verify_opts, noise_opts;
  std::string table_mode, verify_suite;

  CLI::App* solve = app.add_subcommand("solve", "Run one trajectory and write the solution");
  add_common_flags(solve, solve_opts, true);

  CLI::App* table = app.add_subcommand("table", "Monte Carlo convergence-rate table");
  table->add_option("mode", table_mode, "temporal or spatial")
      ->required()
      ->check(CLI::IsMember({"temporal", "spatial"}));
  add_common_flags(table, table_opts, true);

  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", verify_suite, "ml, cq, fem, noise, or oracle")->required();
  add_common_flags(verify, verify_opts, false);

  CLI::App* sample = app.add_subcommand("sample-noise", "Sample a sheet-increment field");
  add_common_flags(sample, noise_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (table->parsed()) return cmd_table(table_mode, table_opts);
    if (verify->parsed()) return cmd_verify(verify_suite, verify_opts);
    if (sample->parsed()) return cmd_sample_noise(noise_opts);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailure;
  }
  return kExitConfigError;
}
