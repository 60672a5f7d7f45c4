#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "blowup/classifier.hpp"
#include "blowup/config.hpp"
#include "blowup/io.hpp"
#include "blowup/json_codec.hpp"
#include "blowup/ode_predictor.hpp"
#include "blowup/svg.hpp"
#include "blowup/sweep.hpp"
#include "blowup/theory_monitor.hpp"
#include "blowup/wave_solver.hpp"

namespace fs = std::filesystem;
using namespace blowup;

namespace {

int thread_cap() {
  const char* env = std::getenv("BLOWUP_LAB_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 0;
  return static_cast<int>(std::min(v, 256L));
}

std::string snap_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04zu.csv", i);
  return buf;
}

BlowupClassification<double> classify_run(const RunResult<double>& res, const Grid<double>& g,
                                          double blow_threshold) {
  ClassifierConfig<double> cc;
  cc.min_peak = blow_threshold * (1 - 1e-9);
  return classify_terminal(res.snapshots[res.outcome.final_state_index], g, cc);
}

int cmd_simulate(cfg::SimulateConfig c, const fs::path& out) {
  if (c.snapshot_count > 0 && c.solver.snapshot_times.empty()) {
    // locate the event first, then re-run with evenly spaced profile times
    const RunResult<double> probe = run(c.ic, c.params, c.grid, c.solver);
    const double t_last = probe.outcome.t_event * (1 - 1e-6);
    for (int i = 0; i < c.snapshot_count; ++i)
      c.solver.snapshot_times.push_back(c.snapshot_count == 1
                                            ? 0.0
                                            : t_last * double(i) / (c.snapshot_count - 1));
  }
  const RunResult<double> res = run(c.ic, c.params, c.grid, c.solver);

  fs::create_directories(out / "snapshots");
  Json j;
  j["outcome"] = to_json(res.outcome);
  // the first recorded snapshot is the initial state only when t=0 was
  // scheduled (or the run was terminal on arrival); otherwise rebuild it
  const bool have_t0 = !res.snapshots.empty() && res.snapshots.front().t == 0.0;
  j["energy_initial"] = discrete_energy(have_t0 ? res.snapshots.front() : evaluate_ic(c.ic, c.grid),
                                        c.params, c.grid);
  j["energy_final"] =
      discrete_energy(res.snapshots[res.outcome.final_state_index], c.params, c.grid);
  if (res.outcome.kind == OutcomeKind::Blowup)
    j["classification"] = to_json(classify_run(res, c.grid, c.solver.blow_threshold));
  else
    j["classification"] = nullptr;

  std::vector<std::string> files;
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    const std::string name = snap_name(i);
    write_snapshot_csv(out / "snapshots" / name, res.snapshots[i], c.grid);
    files.push_back("snapshots/" + name);
  }
  j["snapshot_files"] = files;
  write_text_file(out / "outcome.json", j.dump(2) + "\n");

  std::cout << "simulate: outcome=" << name_of(res.outcome.kind)
            << " t_event=" << fmt_g17(res.outcome.t_event)
            << " peak_uxx=" << fmt_g17(res.outcome.peak_uxx) << "\n"
            << "wrote " << (out / "outcome.json").string() << " and " << res.snapshots.size()
            << " snapshot(s)\n";
  return 0;
}

int cmd_predict(const cfg::PredictConfig& c, const fs::path& out) {
  const Prop1Verdict<double> v = classify(CriticalData<double>{c.alpha, c.b0, c.db0});
  const Json j = to_json(v);
  std::cout << j.dump(2) << "\n";
  fs::create_directories(out);
  write_text_file(out / "verdict.json", j.dump(2) + "\n");
  return 0;
}

int cmd_sweep(SweepSpec spec, const fs::path& out) {
  if (const int cap = thread_cap(); cap > 0) spec.workers = std::min(spec.workers, cap);
  const PhaseDiagram pd = run_sweep(spec);
  const fs::path csv = save_diagram(pd, out);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& cell : pd.cells) ++counts[static_cast<int>(cell.outcome)];
  std::cout << "sweep: wrote " << csv.string() << "\n"
            << "cells=" << pd.cells.size() << " blowup=" << counts[0]
            << " boundary_hit=" << counts[1] << " max_time=" << counts[2]
            << " breakdown=" << counts[3] << "\n";
  return 0;
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::HypothesisUnmet: return "hypothesis_unmet";
  }
  return "?";
}

int cmd_monitor(const cfg::MonitorConfig& c, const fs::path& out) {
  const auto [ic_n, scale] = rescale_to_normalized(c.params, c.ic);
  const double X0 = c.x0_fraction * c.X;
  const double X1 = (c.X - X0) / 2;

  SolverConfig<double> solver = c.solver;
  solver.snapshot_times = monitor_schedule(X1, c.t_end, c.dt_target);
  solver.t_max = solver.snapshot_times.back();
  const Parameters<double> unit{1.0, 1.0};
  const RunResult<double> res = run(ic_n, unit, c.grid, solver);

  // drop the appended terminal state: the monitor wants the uniform stack
  std::vector<FieldState<double>> stack(res.snapshots.begin(),
                                        res.snapshots.empty() ? res.snapshots.end()
                                                              : res.snapshots.end() - 1);

  Json j;
  j["scale"] = Json{{"alpha", scale.alpha}, {"beta", scale.beta}};
  j["window"] = Json{{"X", c.X}, {"X0", X0}, {"X1", X1}};
  j["outcome"] = to_json(res.outcome);

  std::string checks_error;
  try {
    if (stack.empty()) throw std::invalid_argument("no snapshots recorded");
    const TheoremInputs<double> in =
        make_theorem_inputs(stack.front().u, stack.front().v, c.grid, c.X, X0);
    const MonitorReport<double> rep = monitor_H(stack, c.grid, in, c.c4_samples);
    j["epsilon"] = in.epsilon;
    j["hypothesis_met"] = in.hypothesis_met;
    j["tol_abs"] = rep.tol_abs;
    j["times"] = rep.times;
    j["H"] = rep.H;
    j["Hp"] = rep.Hp;
    j["Hpp"] = rep.Hpp;
    j["c4"] = Json{{"times", rep.c4_times}, {"direct", rep.c4_direct}, {"lower", rep.c4_lower}};
    Json checks = Json::array();
    for (const auto& ck : rep.checks) {
      checks.push_back(
          Json{{"id", ck.id}, {"status", status_name(ck.status)}, {"margin", ck.margin}});
      std::cout << ck.id << ": " << status_name(ck.status) << " margin=" << fmt_g17(ck.margin)
                << "\n";
    }
    j["checks"] = checks;
  } catch (const std::exception& e) {
    checks_error = e.what();
    j["checks"] = Json::array();
    std::cout << "checks skipped: " << checks_error << "\n";
  }
  if (!checks_error.empty()) j["checks_error"] = checks_error;

  const auto timeline = epsilon_timeline(stack, c.grid, c.X, c.x0_fraction);
  Json tl = Json::array();
  for (const auto& [t, eps] : timeline) tl.push_back(Json{{"t", t}, {"epsilon", eps}});
  j["epsilon_timeline"] = tl;
  j["epsilon_crossing"] = nullptr;
  if (!timeline.empty() && !(timeline.front().second > 0)) {
    for (const auto& [t, eps] : timeline)
      if (eps > 0) {
        j["epsilon_crossing"] = t;
        std::cout << "epsilon crossed 0 at t=" << fmt_g17(t) << "\n";
        break;
      }
  }

  fs::create_directories(out);
  write_text_file(out / "report.json", j.dump(2) + "\n");
  std::cout << "monitor: outcome=" << name_of(res.outcome.kind) << " wrote "
            << (out / "report.json").string() << "\n";
  return 0;
}

int cmd_plot(const cfg::PlotConfig& c, const fs::path& out) {
  fs::create_directories(out);
  if (c.kind == cfg::PlotConfig::Kind::Profiles) {
    fs::path dir = c.input;
    if (fs::is_directory(dir / "snapshots")) dir /= "snapshots";
    if (!fs::is_directory(dir)) throw IoError("profiles input is not a directory: " + dir.string());
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".csv")
        paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw IoError("no snapshot CSVs under " + dir.string());
    std::vector<Curve> curves;
    for (const auto& p : paths) {
      const SnapshotCsv snap = read_snapshot_csv(p);
      curves.push_back(Curve{snap.t, snap.x, snap.u});
    }
    std::sort(curves.begin(), curves.end(),
              [](const Curve& a, const Curve& b) { return a.t < b.t; });
    write_text_file(out / "profiles.svg", svg_profile_stack(curves, c.title));
    std::cout << "plot: wrote " << (out / "profiles.svg").string() << "\n";
  } else {
    if (!fs::is_regular_file(c.input)) throw IoError("phase input not found: " + c.input.string());
    const PhaseDiagram pd = load_diagram(c.input);
    write_text_file(out / "phase.svg", svg_heatmap(pd, c.beta_axis, c.title));
    std::cout << "plot: wrote " << (out / "phase.svg").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << cfg::help_text();
    return 2;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    std::cout << cfg::help_text();
    return 0;
  }
  const std::string command = args[0];
  const auto& names = cfg::command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    std::cerr << "unknown command: " << command << "\n\n" << cfg::help_text();
    return 2;
  }

  std::string config_path, out_override;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i] == "--out" && i + 1 < args.size()) {
      out_override = args[++i];
    } else if (args[i] == "--help" || args[i] == "-h") {
      std::cout << cfg::help_text();
      return 0;
    } else {
      std::cerr << "unrecognized argument: " << args[i] << "\n";
      return 2;
    }
  }
  if (config_path.empty()) {
    std::cerr << "missing --config <path>\n";
    return 2;
  }

  try {
    const Json j = Json::parse(read_text_file(config_path));
    fs::path out = !out_override.empty()          ? fs::path(out_override)
                   : j.is_object() && j.contains("output_dir")
                       ? fs::path(j.at("output_dir").get<std::string>())
                       : fs::path(".");
    if (command == "simulate") return cmd_simulate(cfg::parse_simulate(j), out);
    if (command == "predict") return cmd_predict(cfg::parse_predict(j), out);
    if (command == "sweep") return cmd_sweep(cfg::parse_sweep(j), out);
    if (command == "monitor") return cmd_monitor(cfg::parse_monitor(j), out);
    return cmd_plot(cfg::parse_plot(j), out);
  } catch (const cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
