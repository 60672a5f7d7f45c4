#pragma once

#include <json.hpp>
#include <string>

#include "blowup/classifier.hpp"
#include "blowup/initial_condition.hpp"
#include "blowup/ode_predictor.hpp"
#include "blowup/wave_solver.hpp"

// JSON (de)serialization for the double-precision domain types. nlohmann's
// object keys are stored sorted, so dump() output is canonical — the sweep
// hashes rely on that.
namespace blowup {

using Json = nlohmann::json;

inline const char* name_of(GridKind k) {
  return k == GridKind::Periodic1D ? "periodic_1d" : "radial_3d";
}

inline GridKind grid_kind_from(const std::string& s) {
  if (s == "periodic_1d") return GridKind::Periodic1D;
  if (s == "radial_3d") return GridKind::Radial3D;
  throw std::invalid_argument("unknown grid kind: " + s);
}

inline const char* name_of(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Blowup: return "blowup";
    case OutcomeKind::BoundaryHit: return "boundary_hit";
    case OutcomeKind::MaxTimeReached: return "max_time_reached";
    default: return "numerical_breakdown";
  }
}

inline OutcomeKind outcome_kind_from(const std::string& s) {
  if (s == "blowup") return OutcomeKind::Blowup;
  if (s == "boundary_hit") return OutcomeKind::BoundaryHit;
  if (s == "max_time_reached") return OutcomeKind::MaxTimeReached;
  if (s == "numerical_breakdown") return OutcomeKind::NumericalBreakdown;
  throw std::invalid_argument("unknown outcome kind: " + s);
}

inline const char* name_of(BlowupKind k) {
  switch (k) {
    case BlowupKind::VType: return "V";
    case BlowupKind::MType: return "M";
    default: return "unresolved";
  }
}

inline BlowupKind blowup_kind_from(const std::string& s) {
  if (s == "V") return BlowupKind::VType;
  if (s == "M") return BlowupKind::MType;
  if (s == "unresolved") return BlowupKind::Unresolved;
  throw std::invalid_argument("unknown blowup class: " + s);
}

inline const char* name_of(Confidence c) {
  return c == Confidence::Clear ? "clear" : "near_limit";
}

inline Confidence confidence_from(const std::string& s) {
  if (s == "clear") return Confidence::Clear;
  if (s == "near_limit") return Confidence::NearLimit;
  throw std::invalid_argument("unknown confidence: " + s);
}

inline const char* name_of(Prop1Case c) {
  switch (c) {
    case Prop1Case::DivergesUp: return "diverges_up";
    case Prop1Case::CollapsesThenDiverges: return "collapses_then_diverges";
    case Prop1Case::DivergesFromRest: return "diverges_from_rest";
    default: return "constant";
  }
}

inline Json to_json(const Grid<double>& g) {
  return Json{{"kind", name_of(g.kind)},
              {"n_points", g.n_points},
              {"x_min", g.x_min},
              {"x_max", g.x_max}};
}

inline Grid<double> grid_from_json(const Json& j) {
  return build_grid<double>(grid_kind_from(j.at("kind").get<std::string>()),
                            j.at("n_points").get<Index>(), j.at("x_min").get<double>(),
                            j.at("x_max").get<double>());
}

inline Json to_json(const FieldSpec<double>& fs) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZeroSpec>) {
          return Json{{"type", "zero"}};
        } else if constexpr (std::is_same_v<T, GaussianSpec<double>>) {
          return Json{{"type", "gaussian"},
                      {"amplitude", s.amplitude},
                      {"k", s.k},
                      {"center", s.center}};
        } else if constexpr (std::is_same_v<T, QuadraticSpec<double>>) {
          return Json{{"type", "quadratic"}, {"coeff", s.coeff}};
        } else {
          Json values = Json::array();
          for (Index i = 0; i < s.values.size(); ++i) values.push_back(s.values[i]);
          return Json{{"type", "samples"}, {"values", std::move(values)}};
        }
      },
      fs);
}

inline FieldSpec<double> field_spec_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "zero") return ZeroSpec{};
  if (type == "gaussian")
    return GaussianSpec<double>{j.at("amplitude").get<double>(), j.at("k").get<double>(),
                                j.value("center", 0.0)};
  if (type == "quadratic") return QuadraticSpec<double>{j.at("coeff").get<double>()};
  if (type == "samples") {
    const auto& arr = j.at("values");
    SamplesSpec<double> s;
    s.values.resize(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      s.values[static_cast<Index>(i)] = arr[i].get<double>();
    return s;
  }
  throw std::invalid_argument("unknown field spec type: " + type);
}

inline Json to_json(const InitialCondition<double>& ic) {
  return Json{{"u0", to_json(ic.u0)}, {"ut0", to_json(ic.ut0)}};
}

inline InitialCondition<double> ic_from_json(const Json& j) {
  InitialCondition<double> ic;
  if (j.contains("u0")) ic.u0 = field_spec_from_json(j.at("u0"));
  if (j.contains("ut0")) ic.ut0 = field_spec_from_json(j.at("ut0"));
  return ic;
}

inline Json to_json(const SolverConfig<double>& c) {
  Json j{{"rel_tol", c.rel_tol},
         {"abs_tol", c.abs_tol},
         {"dt_init", c.dt_init},
         {"dt_min", c.dt_min},
         {"dt_max", c.dt_max},
         {"t_max", c.t_max},
         {"blow_threshold", c.blow_threshold},
         {"boundary_threshold", c.boundary_threshold}};
  if (!c.snapshot_times.empty()) j["snapshot_times"] = c.snapshot_times;
  return j;
}

inline SolverConfig<double> solver_from_json(const Json& j) {
  SolverConfig<double> c;
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.abs_tol = j.value("abs_tol", c.abs_tol);
  c.dt_init = j.value("dt_init", c.dt_init);
  c.dt_min = j.value("dt_min", c.dt_min);
  c.dt_max = j.value("dt_max", c.dt_max);
  c.t_max = j.value("t_max", c.t_max);
  c.blow_threshold = j.value("blow_threshold", c.blow_threshold);
  c.boundary_threshold = j.value("boundary_threshold", c.boundary_threshold);
  if (j.contains("snapshot_times"))
    c.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
  validate(c);
  return c;
}

inline Json to_json(const RunOutcome<double>& o) {
  Json j{{"kind", name_of(o.kind)},
         {"t_event", o.t_event},
         {"peak_uxx", o.peak_uxx},
         {"step_count", o.step_count},
         {"rhs_evals", o.rhs_evals},
         {"suspected_blowup", o.suspected_blowup}};
  if (o.location) j["location"] = *o.location;
  return j;
}

inline Json to_json(const BlowupClassification<double>& c) {
  return Json{{"kind", name_of(c.kind)},
              {"distance", c.distance},
              {"peak_separation", c.peak_separation},
              {"confidence", name_of(c.confidence)}};
}

inline Json to_json(const Prop1Verdict<double>& v) {
  Json j{{"case", name_of(v.case_tag)}, {"c", v.c}, {"marginal", v.marginal}};
  j["t_plus"] = v.t_plus ? Json(*v.t_plus) : Json(nullptr);
  j["t_minus"] = v.t_minus ? Json(*v.t_minus) : Json(nullptr);
  j["b_star"] = v.b_star ? Json(*v.b_star) : Json(nullptr);
  j["t_total"] = v.t_total ? Json(*v.t_total) : Json(nullptr);
  return j;
}

}  // namespace blowup
