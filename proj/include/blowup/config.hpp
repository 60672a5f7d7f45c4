#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowup/json_codec.hpp"
#include "blowup/svg.hpp"
#include "blowup/sweep.hpp"

// Config schema for the command-line tool. One table per command drives both
// unknown-key rejection and the --help listing, so the two cannot drift.

namespace blowup::cfg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KeyDoc {
  std::string path;
  const char* type;
  const char* desc;
};

namespace detail {

inline void add_parameters(std::vector<KeyDoc>& v, const std::string& p) {
  v.push_back({p, "object", "equation coefficients"});
  v.push_back({p + ".alpha", "number", "gradient-squared coefficient (>= 0)"});
  v.push_back({p + ".beta", "number", "diffusion/wave coefficient (>= 0)"});
}

inline void add_grid(std::vector<KeyDoc>& v, const std::string& p) {
  v.push_back({p, "object", "spatial grid"});
  v.push_back({p + ".kind", "string", "periodic_1d | radial_3d"});
  v.push_back({p + ".n_points", "int", "grid points (>= 16)"});
  v.push_back({p + ".x_min", "number", "left endpoint (0 for radial)"});
  v.push_back({p + ".x_max", "number", "right endpoint"});
}

inline void add_field(std::vector<KeyDoc>& v, const std::string& p, const char* what) {
  v.push_back({p, "object", what});
  v.push_back({p + ".type", "string", "zero | gaussian | quadratic | samples"});
  v.push_back({p + ".amplitude", "number", "gaussian: a in a*exp(-k (x-c)^2)"});
  v.push_back({p + ".k", "number", "gaussian: width parameter (> 0)"});
  v.push_back({p + ".center", "number", "gaussian: center c"});
  v.push_back({p + ".coeff", "number", "quadratic: q in q*x^2"});
  v.push_back({p + ".values", "number[]", "samples: one value per grid point"});
}

inline void add_ic(std::vector<KeyDoc>& v, const std::string& p) {
  v.push_back({p, "object", "initial data"});
  add_field(v, p + ".u0", "initial displacement");
  add_field(v, p + ".ut0", "initial velocity");
}

inline void add_solver(std::vector<KeyDoc>& v, const std::string& p, bool with_snapshots) {
  v.push_back({p, "object", "time integrator settings"});
  v.push_back({p + ".rel_tol", "number", "relative step tolerance"});
  v.push_back({p + ".abs_tol", "number", "absolute step tolerance"});
  v.push_back({p + ".dt_init", "number", "initial step"});
  v.push_back({p + ".dt_min", "number", "smallest step before giving up"});
  v.push_back({p + ".dt_max", "number", "largest step"});
  v.push_back({p + ".t_max", "number", "time horizon"});
  v.push_back({p + ".blow_threshold", "number", "max |u_xx| that counts as divergence"});
  v.push_back({p + ".boundary_threshold", "number", "|u| at the edge that counts as escape"});
  if (with_snapshots)
    v.push_back({p + ".snapshot_times", "number[]", "profile sample times (ascending)"});
}

inline void add_axis(std::vector<KeyDoc>& v, const std::string& p, const char* what) {
  v.push_back({p, "object", what});
  v.push_back({p + ".min", "number", "first value"});
  v.push_back({p + ".max", "number", "last value"});
  v.push_back({p + ".count", "int", "number of values (>= 1)"});
  v.push_back({p + ".scale", "string", "linear | log"});
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "predict", "sweep", "monitor", "plot"};
  return names;
}

inline std::vector<KeyDoc> schema(const std::string& command) {
  std::vector<KeyDoc> v;
  v.push_back({"command", "string", "optional; must match the invoked command"});
  v.push_back({"output_dir", "string", "output directory (--out overrides; default '.')"});
  if (command == "simulate") {
    detail::add_parameters(v, "parameters");
    detail::add_grid(v, "grid");
    detail::add_ic(v, "ic");
    detail::add_solver(v, "solver", true);
    v.push_back({"snapshot_count", "int",
                 "if > 0 and no snapshot_times: pre-run to find the event time, then record "
                 "this many evenly spaced profiles"});
  } else if (command == "predict") {
    v.push_back({"alpha", "number", "gradient-squared coefficient (> 0)"});
    v.push_back({"b0", "number", "initial second derivative at the peak"});
    v.push_back({"db0", "number", "its initial time derivative"});
  } else if (command == "sweep") {
    detail::add_axis(v, "alpha_axis", "alpha lattice");
    detail::add_axis(v, "beta_axis", "beta lattice");
    detail::add_grid(v, "grid");
    detail::add_ic(v, "ic");
    detail::add_solver(v, "solver", true);
    v.push_back({"workers", "int", "thread count (BLOWUP_LAB_THREADS caps it)"});
  } else if (command == "monitor") {
    detail::add_parameters(v, "parameters");
    detail::add_grid(v, "grid");
    detail::add_ic(v, "ic");
    detail::add_solver(v, "solver", false);
    v.push_back({"window", "object", "integral window at t = 0"});
    v.push_back({"window.X", "number", "right endpoint of the data support (> 0)"});
    v.push_back({"window.x0_fraction", "number", "X0 = fraction * X, in (0, 1); default 0.25"});
    v.push_back({"t_end", "number", "monitoring horizon"});
    v.push_back({"dt_target", "number", "target snapshot spacing (refined so X1 lands on a node)"});
    v.push_back({"c4_samples", "int", "times at which the triple-integral bound is checked (default 4)"});
  } else if (command == "plot") {
    v.push_back({"input", "string", "simulate output dir (profiles) or sweep CSV path (phase)"});
    v.push_back({"kind", "string", "profiles | phase"});
    v.push_back({"beta_axis", "string", "phase only: raw | sqrt (default raw)"});
    v.push_back({"title", "string", "plot title (optional)"});
  } else {
    throw ConfigError("unknown command: " + command);
  }
  return v;
}

namespace detail {

inline void check_field_variant(const Json& obj, const std::string& path) {
  if (!obj.contains("type") || !obj.at("type").is_string()) return;
  static const std::map<std::string, std::set<std::string>> members{
      {"zero", {"type"}},
      {"gaussian", {"type", "amplitude", "k", "center"}},
      {"quadratic", {"type", "coeff"}},
      {"samples", {"type", "values"}}};
  const auto f = members.find(obj.at("type").get<std::string>());
  if (f == members.end()) return;  // unknown type name fails later with its own message
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!f->second.count(it.key()))
      throw ConfigError("config key " + path + "." + it.key() + " does not apply to field type '" +
                        f->first + "'");
}

inline void walk_keys(const Json& j, const std::string& prefix,
                      const std::set<std::string>& allowed, const std::string& command) {
  if (!j.is_object()) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = prefix + it.key();
    if (!allowed.count(path))
      throw ConfigError("unknown config key for " + command + ": " + path);
    if (it->is_object()) {
      const auto k = it.key();
      if (k == "u0" || k == "ut0") check_field_variant(*it, path);
      walk_keys(*it, path + ".", allowed, command);
    }
  }
}

}  // namespace detail

inline void check_keys(const Json& j, const std::string& command) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  std::set<std::string> allowed;
  for (const auto& k : schema(command)) allowed.insert(k.path);
  detail::walk_keys(j, "", allowed, command);
  if (j.contains("command")) {
    const auto c = j.at("command").get<std::string>();
    if (c != command)
      throw ConfigError("config says command '" + c + "' but '" + command + "' was invoked");
  }
}

inline const Json& need(const Json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing required config key: " + where + key);
  return *it;
}

struct SimulateConfig {
  Parameters<double> params;
  Grid<double> grid;
  InitialCondition<double> ic;
  SolverConfig<double> solver;
  int snapshot_count = 0;
};

inline SimulateConfig parse_simulate(const Json& j) {
  check_keys(j, "simulate");
  SimulateConfig c;
  const Json& p = need(j, "parameters", "");
  c.params.alpha = need(p, "alpha", "parameters.").get<double>();
  c.params.beta = need(p, "beta", "parameters.").get<double>();
  validate(c.params);
  c.grid = grid_from_json(need(j, "grid", ""));
  c.ic = ic_from_json(need(j, "ic", ""));
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
  c.snapshot_count = j.value("snapshot_count", 0);
  if (c.snapshot_count < 0) throw ConfigError("snapshot_count must be >= 0");
  return c;
}

struct PredictConfig {
  double alpha = 0, b0 = 0, db0 = 0;
};

inline PredictConfig parse_predict(const Json& j) {
  check_keys(j, "predict");
  PredictConfig c;
  c.alpha = need(j, "alpha", "").get<double>();
  c.b0 = need(j, "b0", "").get<double>();
  c.db0 = need(j, "db0", "").get<double>();
  return c;
}

inline SweepSpec parse_sweep(const Json& j) {
  check_keys(j, "sweep");
  for (const char* k : {"alpha_axis", "beta_axis", "grid", "ic", "solver"}) need(j, k, "");
  Json core = j;
  core.erase("command");
  core.erase("output_dir");
  return sweep_spec_from_json(core);
}

struct MonitorConfig {
  Parameters<double> params;
  Grid<double> grid;
  InitialCondition<double> ic;
  SolverConfig<double> solver;
  double X = 0;
  double x0_fraction = 0.25;
  double t_end = 0;
  double dt_target = 0;
  int c4_samples = 4;
};

inline MonitorConfig parse_monitor(const Json& j) {
  check_keys(j, "monitor");
  MonitorConfig c;
  const Json& p = need(j, "parameters", "");
  c.params.alpha = need(p, "alpha", "parameters.").get<double>();
  c.params.beta = need(p, "beta", "parameters.").get<double>();
  validate(c.params);
  c.grid = grid_from_json(need(j, "grid", ""));
  c.ic = ic_from_json(need(j, "ic", ""));
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
  const Json& w = need(j, "window", "");
  c.X = need(w, "X", "window.").get<double>();
  c.x0_fraction = w.value("x0_fraction", 0.25);
  c.t_end = need(j, "t_end", "").get<double>();
  c.dt_target = need(j, "dt_target", "").get<double>();
  c.c4_samples = j.value("c4_samples", 4);
  if (!(c.X > 0)) throw ConfigError("window.X must be positive");
  if (!(c.x0_fraction > 0 && c.x0_fraction < 1))
    throw ConfigError("window.x0_fraction must lie in (0, 1)");
  if (!(c.t_end > 0) || !(c.dt_target > 0))
    throw ConfigError("t_end and dt_target must be positive");
  if (c.c4_samples < 1) throw ConfigError("c4_samples must be >= 1");
  return c;
}

struct PlotConfig {
  std::filesystem::path input;
  enum class Kind { Profiles, Phase } kind = Kind::Profiles;
  BetaAxis beta_axis = BetaAxis::Raw;
  std::string title;
};

inline PlotConfig parse_plot(const Json& j) {
  check_keys(j, "plot");
  PlotConfig c;
  c.input = need(j, "input", "").get<std::string>();
  const auto kind = need(j, "kind", "").get<std::string>();
  if (kind == "profiles")
    c.kind = PlotConfig::Kind::Profiles;
  else if (kind == "phase")
    c.kind = PlotConfig::Kind::Phase;
  else
    throw ConfigError("plot kind must be 'profiles' or 'phase', got '" + kind + "'");
  const auto axis = j.value("beta_axis", "raw");
  if (axis == "raw")
    c.beta_axis = BetaAxis::Raw;
  else if (axis == "sqrt")
    c.beta_axis = BetaAxis::Sqrt;
  else
    throw ConfigError("beta_axis must be 'raw' or 'sqrt', got '" + axis + "'");
  c.title = j.value("title", kind == "profiles" ? "solution profiles" : "phase diagram");
  return c;
}

inline std::string help_text() {
  std::string s =
      "usage: blowup-lab <command> --config <path> [--out <dir>]\n"
      "\n"
      "commands: simulate | predict | sweep | monitor | plot\n"
      "exit codes: 0 success, 2 config error, 3 I/O error\n"
      "environment: BLOWUP_LAB_THREADS caps sweep workers\n"
      "\n"
      "config file: a single JSON object; unknown keys are rejected.\n";
  for (const auto& cmd : command_names()) {
    s += "\n[" + cmd + "]\n";
    for (const auto& k : schema(cmd)) {
      s += "  " + k.path;
      if (k.path.size() < 26) s.append(26 - k.path.size(), ' ');
      s += " ";
      s += k.type;
      const std::size_t tlen = std::string(k.type).size();
      if (tlen < 10) s.append(10 - tlen, ' ');
      s += k.desc;
      s += "\n";
    }
  }
  return s;
}

}  // namespace blowup::cfg
