#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blowup/classifier.hpp"
#include "blowup/io.hpp"
#include "blowup/json_codec.hpp"
#include "blowup/wave_solver.hpp"

namespace blowup {

struct AxisSpec {
  double min = 0;
  double max = 0;
  int count = 1;
  enum class Scale { Linear, Log } scale = Scale::Linear;
  bool operator==(const AxisSpec&) const = default;
};

inline std::vector<double> axis_values(const AxisSpec& a) {
  if (a.count < 1) throw std::invalid_argument("axis: count must be >= 1");
  if (a.count > 1 && !(a.max > a.min))
    throw std::invalid_argument("axis: max must exceed min when count > 1");
  if (a.scale == AxisSpec::Scale::Log && !(a.min > 0))
    throw std::invalid_argument("axis: log scale requires positive endpoints");
  std::vector<double> v(a.count);
  if (a.count == 1) {
    v[0] = a.min;
    return v;
  }
  if (a.scale == AxisSpec::Scale::Linear) {
    for (int i = 0; i < a.count; ++i)
      v[i] = a.min + (a.max - a.min) * double(i) / double(a.count - 1);
  } else {
    const double la = std::log(a.min), lb = std::log(a.max);
    for (int i = 0; i < a.count; ++i)
      v[i] = std::exp(la + (lb - la) * double(i) / double(a.count - 1));
  }
  return v;
}

struct SweepSpec {
  AxisSpec alpha_axis;
  AxisSpec beta_axis;
  Grid<double> grid;
  InitialCondition<double> ic;
  SolverConfig<double> solver;
  int workers = 1;
};

struct CellRecord {
  OutcomeKind outcome = OutcomeKind::NumericalBreakdown;
  double t_event = 0;
  std::optional<double> distance;        // Blowup cells only
  std::optional<BlowupKind> blowup_kind; // likewise
  std::optional<Confidence> confidence;
  bool operator==(const CellRecord&) const = default;
};

// Cells are row-major over (alpha index, beta index).
struct PhaseDiagram {
  SweepSpec spec;
  std::string spec_hash;
  std::vector<double> alphas, betas;
  std::vector<CellRecord> cells;
};

inline Json to_json(const SweepSpec& s) {
  auto axis = [](const AxisSpec& a) {
    return Json{{"min", a.min},
                {"max", a.max},
                {"count", a.count},
                {"scale", a.scale == AxisSpec::Scale::Linear ? "linear" : "log"}};
  };
  return Json{{"alpha_axis", axis(s.alpha_axis)}, {"beta_axis", axis(s.beta_axis)},
              {"grid", to_json(s.grid)},          {"ic", to_json(s.ic)},
              {"solver", to_json(s.solver)},      {"workers", s.workers}};
}

inline SweepSpec sweep_spec_from_json(const Json& j) {
  auto axis = [](const Json& a) {
    AxisSpec out;
    out.min = a.at("min").get<double>();
    out.max = a.at("max").get<double>();
    out.count = a.at("count").get<int>();
    const auto scale = a.at("scale").get<std::string>();
    if (scale == "linear")
      out.scale = AxisSpec::Scale::Linear;
    else if (scale == "log")
      out.scale = AxisSpec::Scale::Log;
    else
      throw std::invalid_argument("unknown axis scale: " + scale);
    return out;
  };
  SweepSpec s;
  s.alpha_axis = axis(j.at("alpha_axis"));
  s.beta_axis = axis(j.at("beta_axis"));
  s.grid = grid_from_json(j.at("grid"));
  s.ic = ic_from_json(j.at("ic"));
  s.solver = solver_from_json(j.at("solver"));
  s.workers = j.value("workers", 1);
  return s;
}

inline std::string spec_digest(const SweepSpec& s) { return hex16(fnv1a64(to_json(s).dump())); }

namespace detail {

inline CellRecord simulate_cell(double alpha, double beta, const SweepSpec& spec) {
  CellRecord rec;
  try {
    const Parameters<double> par{alpha, beta};
    const RunResult<double> res = run(spec.ic, par, spec.grid, spec.solver);
    rec.outcome = res.outcome.kind;
    rec.t_event = res.outcome.t_event;
    if (res.outcome.kind == OutcomeKind::Blowup) {
      ClassifierConfig<double> cc;
      // the bisected terminal state sits at (or a hair past) the threshold
      cc.min_peak = spec.solver.blow_threshold * (1 - 1e-9);
      const auto cls =
          classify_terminal(res.snapshots[res.outcome.final_state_index], spec.grid, cc);
      rec.distance = cls.distance;
      rec.blowup_kind = cls.kind;
      rec.confidence = cls.confidence;
    }
  } catch (const std::exception&) {
    rec = CellRecord{};  // recorded as a breakdown cell; the sweep must not abort
    rec.outcome = OutcomeKind::NumericalBreakdown;
  }
  return rec;
}

}  // namespace detail

// Run the full (alpha, beta) lattice. Cells are independent; a static block
// partition over `workers` threads keeps the output independent of the
// scheduling (each cell's arithmetic is identical no matter who runs it).
inline PhaseDiagram run_sweep(const SweepSpec& spec) {
  validate(spec.solver);
  PhaseDiagram pd;
  pd.spec = spec;
  pd.spec_hash = spec_digest(spec);
  pd.alphas = axis_values(spec.alpha_axis);
  pd.betas = axis_values(spec.beta_axis);
  const std::size_t total = pd.alphas.size() * pd.betas.size();
  pd.cells.assign(total, CellRecord{});

  const int workers =
      std::clamp(spec.workers, 1, static_cast<int>(std::min<std::size_t>(total, 256)));
  auto block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t ia = i / pd.betas.size();
      const std::size_t ib = i % pd.betas.size();
      pd.cells[i] = detail::simulate_cell(pd.alphas[ia], pd.betas[ib], spec);
    }
  };
  if (workers == 1) {
    block(0, total);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = total * w / workers;
      const std::size_t end = total * (w + 1) / workers;
      pool.emplace_back(block, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return pd;
}

inline std::string diagram_csv(const PhaseDiagram& pd) {
  std::string out = "alpha,beta,outcome,t_event,distance,class,confidence\n";
  for (std::size_t ia = 0; ia < pd.alphas.size(); ++ia) {
    for (std::size_t ib = 0; ib < pd.betas.size(); ++ib) {
      const CellRecord& c = pd.cells[ia * pd.betas.size() + ib];
      out += fmt_g17(pd.alphas[ia]);
      out += ',';
      out += fmt_g17(pd.betas[ib]);
      out += ',';
      out += name_of(c.outcome);
      out += ',';
      out += fmt_g17(c.t_event);
      out += ',';
      if (c.distance) out += fmt_g17(*c.distance);
      out += ',';
      if (c.blowup_kind) out += name_of(*c.blowup_kind);
      out += ',';
      if (c.confidence) out += name_of(*c.confidence);
      out += '\n';
    }
  }
  return out;
}

// Writes sweep_<hash>.csv plus a .json sidecar holding the spec and digests.
// Returns the CSV path.
inline std::filesystem::path save_diagram(const PhaseDiagram& pd,
                                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv = diagram_csv(pd);
  const std::string stem = "sweep_" + pd.spec_hash;
  const auto csv_path = dir / (stem + ".csv");
  Json sidecar{{"spec", to_json(pd.spec)},
               {"spec_hash", pd.spec_hash},
               {"data_hash", hex16(fnv1a64(csv))}};
  write_text_file(csv_path, csv);
  write_text_file(dir / (stem + ".json"), sidecar.dump(2) + "\n");
  return csv_path;
}

inline PhaseDiagram load_diagram(const std::filesystem::path& csv_path) {
  const std::string csv = read_text_file(csv_path);
  auto sidecar_path = csv_path;
  sidecar_path.replace_extension(".json");
  Json sidecar;
  try {
    sidecar = Json::parse(read_text_file(sidecar_path));
  } catch (const Json::parse_error& e) {
    throw IoError("sweep sidecar is not valid JSON: " + sidecar_path.string());
  }

  PhaseDiagram pd;
  pd.spec = sweep_spec_from_json(sidecar.at("spec"));
  pd.spec_hash = sidecar.at("spec_hash").get<std::string>();
  if (spec_digest(pd.spec) != pd.spec_hash)
    throw IoError("sweep integrity: spec hash mismatch in " + sidecar_path.string());
  if (hex16(fnv1a64(csv)) != sidecar.at("data_hash").get<std::string>())
    throw IoError("sweep integrity: data hash mismatch for " + csv_path.string());

  pd.alphas = axis_values(pd.spec.alpha_axis);
  pd.betas = axis_values(pd.spec.beta_axis);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (f.size() < 7) {
      const std::size_t next = f.size() < 6 ? line.find(',', pos) : line.size();
      if (next == std::string::npos) throw IoError("sweep csv short row: " + csv_path.string());
      f.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    CellRecord c;
    c.outcome = outcome_kind_from(f[2]);
    c.t_event = parse_double(f[3]);
    if (!f[4].empty()) c.distance = parse_double(f[4]);
    if (!f[5].empty()) c.blowup_kind = blowup_kind_from(f[5]);
    if (!f[6].empty()) c.confidence = confidence_from(f[6]);
    pd.cells.push_back(c);
  }
  if (pd.cells.size() != pd.alphas.size() * pd.betas.size())
    throw IoError("sweep integrity: cell count does not match axes in " + csv_path.string());
  return pd;
}

}  // namespace blowup
