#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blowup/dopri.hpp"
#include "blowup/initial_condition.hpp"
#include "blowup/stencils.hpp"

namespace blowup {

template <class S = double>
struct SolverConfig {
  S rel_tol = S(1e-11);
  S abs_tol = S(1e-11);
  S dt_init = S(1e-4);
  S dt_min = S(1e-13);
  S dt_max = S(1e-1);
  S t_max = S(10);
  S blow_threshold = S(1e6);      // on max |u_xx|
  S boundary_threshold = S(1e-4); // on |u| at the domain edge
  std::vector<S> snapshot_times;
};

template <class S>
void validate(const SolverConfig<S>& c) {
  if (!(c.rel_tol > S(0)) || !(c.abs_tol > S(0)))
    throw std::invalid_argument("solver config: tolerances must be positive");
  if (!(S(0) < c.dt_min && c.dt_min <= c.dt_init && c.dt_init <= c.dt_max))
    throw std::invalid_argument("solver config: need 0 < dt_min <= dt_init <= dt_max");
  if (!(c.t_max > S(0)))
    throw std::invalid_argument("solver config: t_max must be positive");
  if (!(c.blow_threshold > S(0)) || !(c.boundary_threshold > S(0)))
    throw std::invalid_argument("solver config: thresholds must be positive");
}

enum class OutcomeKind { Blowup, BoundaryHit, MaxTimeReached, NumericalBreakdown };

template <class S = double>
struct RunOutcome {
  OutcomeKind kind = OutcomeKind::MaxTimeReached;
  S t_event = S(0);
  std::optional<S> location;  // x of max |u_xx|, filled for Blowup
  S peak_uxx = S(0);
  std::size_t final_state_index = 0;  // into RunResult::snapshots
  long step_count = 0;
  long rhs_evals = 0;
  bool suspected_blowup = false;  // breakdown with monotone growth of max |u_xx|
};

template <class S = double>
struct RunResult {
  RunOutcome<S> outcome;
  std::vector<FieldState<S>> snapshots;  // requested times plus the final state
};

namespace detail {

// Right-hand side of the first-order system on packed state [u; v].
template <class S>
struct WaveRhs {
  const Grid<S>* grid;
  Parameters<S> par;
  Vec<S> inv_r;  // radial only: 1/r with a zero slot at the origin

  WaveRhs(const Grid<S>& g, const Parameters<S>& p) : grid(&g), par(p) {
    if (g.kind == GridKind::Radial3D) {
      inv_r.resize(g.n_points);
      inv_r[0] = S(0);
      for (Index i = 1; i < g.n_points; ++i) inv_r[i] = S(1) / g.coord(i);
    }
  }

  void operator()(S /*t*/, const Vec<S>& y, Vec<S>& dy) const {
    const Index n = grid->n_points;
    const auto u = y.head(n);
    const auto v = y.tail(n);
    dy.resize(2 * n);
    const Vec<S> ux = d1(Vec<S>(u), *grid);
    const Vec<S> uxx = d2(Vec<S>(u), *grid);
    dy.head(n) = v;
    dy.tail(n) = par.alpha * ux.square() + par.beta * uxx;
    if (grid->kind == GridKind::Radial3D) {
      dy.tail(n) += par.beta * S(2) * (ux * inv_r);
      // even data: u_r -> 0 and (u_rr + 2 u_r / r) -> 3 u_rr at the origin
      dy[n] = S(3) * par.beta * uxx[0];
      dy[n - 1] = S(0);      // Dirichlet clamp at the outer radius
      dy[2 * n - 1] = S(0);
    }
  }
};

template <class S>
S peak_abs_d2(const Vec<S>& y, const Grid<S>& g) {
  const Index n = g.n_points;
  return d2(Vec<S>(y.head(n)), g).abs().maxCoeff();
}

template <class S>
FieldState<S> unpack(S t, const Vec<S>& y, Index n) {
  FieldState<S> s;
  s.t = t;
  s.u = y.head(n);
  s.v = y.tail(n);
  return s;
}

// Quadratically refined location of the largest |u_xx| sample.
template <class S>
S peak_location(const Vec<S>& u, const Grid<S>& g) {
  const Vec<S> w = d2(u, g).abs();
  const Index n = g.n_points;
  Index best = 0;
  for (Index i = 1; i < n; ++i)
    if (w[i] > w[best] ||
        (w[i] == w[best] && std::abs(g.coord(i)) < std::abs(g.coord(best))))
      best = i;
  const bool wrap = g.kind == GridKind::Periodic1D;
  if (!wrap && (best == 0 || best == n - 1)) return g.coord(best);
  const S wm = w[(best - 1 + n) % n], w0 = w[best], wp = w[(best + 1) % n];
  const S denom = wm - S(2) * w0 + wp;
  S delta = S(0);
  if (denom < S(0)) delta = (wm - wp) / (S(2) * denom);
  return g.coord(best) + delta * g.dx;
}

}  // namespace detail

// Right-hand side of u_t = v, v_t = alpha (u_x)^2 + beta u_xx (plus the
// radial 2 u_r / r term on Radial3D grids).
template <class S>
std::pair<Vec<S>, Vec<S>> rhs(const FieldState<S>& s, const Parameters<S>& p,
                              const Grid<S>& g) {
  if (s.u.size() != g.n_points || s.v.size() != g.n_points)
    throw std::invalid_argument("rhs: field size does not match grid");
  if (!s.u.isFinite().all() || !s.v.isFinite().all())
    throw std::domain_error("rhs: non-finite field values");
  detail::WaveRhs<S> f(g, p);
  Vec<S> y(2 * g.n_points), dy;
  y << s.u, s.v;
  f(s.t, y, dy);
  return {Vec<S>(dy.head(g.n_points)), Vec<S>(dy.tail(g.n_points))};
}

template <class S = double>
struct StepOutcome {
  FieldState<S> state;
  S err = S(0);
  S dt_next = S(0);
  bool accepted = false;
};

// Single embedded step on a field state. The driving loop in run() keeps the
// FSAL stage between steps; this entry point is for callers poking at one
// step at a time.
template <class S>
StepOutcome<S> step_dopri(const FieldState<S>& state, const Parameters<S>& p,
                          const Grid<S>& g, const SolverConfig<S>& cfg, S dt) {
  validate(cfg);
  validate(p);
  const Index n = g.n_points;
  detail::WaveRhs<S> f(g, p);
  Vec<S> y(2 * n), f0;
  y << state.u, state.v;
  f(state.t, y, f0);
  auto st = dopri_step(f, state.t, y, f0, dt, cfg.rel_tol, cfg.abs_tol, cfg.dt_max);
  StepOutcome<S> out;
  out.err = st.err;
  out.dt_next = st.dt_next;
  out.accepted = st.accepted;
  out.state = st.accepted ? detail::unpack(state.t + dt, st.y, n) : state;
  return out;
}

// Integrate until blowup, boundary contact, t_max, or breakdown. Snapshot
// times are interpolated with the stepper's dense output; the terminal state
// is always appended as the last snapshot.
template <class S>
RunResult<S> run(const InitialCondition<S>& ic, const Parameters<S>& p, const Grid<S>& g,
                 const SolverConfig<S>& cfg) {
  validate(cfg);
  validate(p);
  const Index n = g.n_points;
  const Index edge = g.kind == GridKind::Periodic1D ? 0 : n - 2;

  FieldState<S> init = evaluate_ic(ic, g);
  RunResult<S> out;

  std::vector<S> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  if (!snaps.empty() && (snaps.front() < S(0) || snaps.back() > cfg.t_max))
    throw std::invalid_argument("solver config: snapshot times outside [0, t_max]");
  std::size_t next_snap = 0;

  Vec<S> y(2 * n);
  y << init.u, init.v;
  detail::WaveRhs<S> f(g, p);

  auto finish = [&](OutcomeKind kind, S t_event, S t_state, const Vec<S>& state,
                    RunOutcome<S> base) {
    base.kind = kind;
    base.t_event = t_event;
    base.peak_uxx = detail::peak_abs_d2(state, g);
    if (kind == OutcomeKind::Blowup)
      base.location = detail::peak_location(Vec<S>(state.head(n)), g);
    out.snapshots.push_back(detail::unpack(t_state, state, n));
    base.final_state_index = out.snapshots.size() - 1;
    out.outcome = base;
    return out;
  };

  RunOutcome<S> acc;  // running counters

  // the initial state can already be terminal
  while (next_snap < snaps.size() && snaps[next_snap] <= S(0)) {
    out.snapshots.push_back(detail::unpack(S(0), y, n));
    ++next_snap;
  }
  if (!y.isFinite().all())
    return finish(OutcomeKind::NumericalBreakdown, S(0), S(0), y, acc);
  if (detail::peak_abs_d2(y, g) > cfg.blow_threshold)
    return finish(OutcomeKind::Blowup, S(0), S(0), y, acc);
  if (std::abs(y[edge]) > cfg.boundary_threshold)
    return finish(OutcomeKind::BoundaryHit, S(0), S(0), y, acc);

  Vec<S> f0;
  f(S(0), y, f0);
  acc.rhs_evals = 1;

  // recent peak |u_xx| history; monotone growth into a breakdown suggests the
  // step collapse was a genuine blowup outrunning the threshold test
  constexpr int kHist = 10;
  std::vector<S> hist;
  hist.reserve(kHist + 1);

  S t = S(0);
  S dt = std::min(cfg.dt_init, cfg.t_max);
  while (true) {
    dt = std::min(dt, cfg.t_max - t);
    auto st = dopri_step(f, t, y, f0, dt, cfg.rel_tol, cfg.abs_tol, cfg.dt_max,
                         &acc.rhs_evals);
    if (!st.accepted) {
      if (dt <= cfg.dt_min * (S(1) + S(1e-9))) {
        bool monotone = hist.size() >= kHist;
        for (std::size_t i = 1; i < hist.size() && monotone; ++i)
          monotone = hist[i] > hist[i - 1];
        acc.suspected_blowup = monotone;
        return finish(OutcomeKind::NumericalBreakdown, t, t, y, acc);
      }
      dt = std::max(st.dt_next, cfg.dt_min);
      continue;
    }

    const S t1 = t + dt;
    ++acc.step_count;
    auto interp = [&](S theta) { return hermite_interp(y, f0, st.y, st.f_end, dt, theta); };

    if (!st.y.isFinite().all())
      return finish(OutcomeKind::NumericalBreakdown, t1, t, y, acc);

    S event_theta = S(2);  // beyond the step == no event
    const S peak1 = detail::peak_abs_d2(st.y, g);
    if (peak1 > cfg.blow_threshold) {
      // bisect for the first threshold crossing; keep the upper endpoint so
      // the reported state is at or past the threshold
      S lo = S(0), hi = S(1);
      while ((hi - lo) * dt > S(1e-6)) {
        const S mid = (lo + hi) / S(2);
        (detail::peak_abs_d2(interp(mid), g) > cfg.blow_threshold ? hi : lo) = mid;
      }
      event_theta = hi;
    }

    while (next_snap < snaps.size() && snaps[next_snap] <= t1) {
      const S ts = snaps[next_snap];
      if (event_theta <= S(1) && ts > t + event_theta * dt) break;
      out.snapshots.push_back(detail::unpack(ts, ts >= t1 ? st.y : interp((ts - t) / dt), n));
      ++next_snap;
    }

    if (event_theta <= S(1)) {
      const S t_event = t + event_theta * dt;
      const Vec<S> ye = event_theta >= S(1) ? st.y : interp(event_theta);
      return finish(OutcomeKind::Blowup, t_event, t_event, ye, acc);
    }
    if (std::abs(st.y[edge]) > cfg.boundary_threshold)
      return finish(OutcomeKind::BoundaryHit, t1, t1, st.y, acc);
    if (t1 >= cfg.t_max)
      return finish(OutcomeKind::MaxTimeReached, t1, t1, st.y, acc);

    hist.push_back(peak1);
    if (hist.size() > kHist) hist.erase(hist.begin());
    y = st.y;
    f0 = st.f_end;
    t = t1;
    dt = std::max(st.dt_next, cfg.dt_min);
  }
}

// Discrete energy of the beta-linear dynamics: sum (v^2 + beta (d1 u)^2) dx.
// The alpha = 0 semi-discrete flow conserves the variant with u (-d2) u
// exactly; this gradient form differs from it by an O(dx^4) bounded
// fluctuation, so on well-resolved data its drift still measures
// time-integration error.
template <class S>
S discrete_energy(const FieldState<S>& s, const Parameters<S>& p, const Grid<S>& g) {
  const Vec<S> ux = d1(s.u, g);
  return (s.v.square() + p.beta * ux.square()).sum() * g.dx;
}

}  // namespace blowup
