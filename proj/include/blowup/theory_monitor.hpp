#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blowup/initial_condition.hpp"
#include "blowup/quadrature.hpp"
#include "blowup/stencils.hpp"

namespace blowup {

template <class S = double>
struct ScaleRecord {
  S alpha = S(1);
  S beta = S(1);
};

// Map data for u_tt = alpha (u_x)^2 + beta u_xx to data for the normalized
// equation u_tt = (u_x)^2 + u_xx: if v solves the general equation then
// w(x,t) = (alpha/beta) v(sqrt(beta) x, t) solves the normalized one, with
// the same blowup instant. Gaussians stay Gaussians (amplitude * alpha/beta,
// width k * beta, center / sqrt(beta)); raw samples would need grid-to-grid
// resampling and are rejected.
template <class S>
std::pair<InitialCondition<S>, ScaleRecord<S>> rescale_to_normalized(
    const Parameters<S>& p, const InitialCondition<S>& ic) {
  if (!(p.alpha > S(0)) || !(p.beta > S(0)))
    throw std::invalid_argument("rescale: alpha and beta must be positive");
  const S amp = p.alpha / p.beta;
  const S root_beta = std::sqrt(p.beta);
  auto map = [&](const FieldSpec<S>& fs) -> FieldSpec<S> {
    return std::visit(
        [&](const auto& s) -> FieldSpec<S> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ZeroSpec>) {
            return s;
          } else if constexpr (std::is_same_v<T, GaussianSpec<S>>) {
            return GaussianSpec<S>{s.amplitude * amp, s.k * p.beta, s.center / root_beta};
          } else if constexpr (std::is_same_v<T, QuadraticSpec<S>>) {
            return QuadraticSpec<S>{s.coeff * p.alpha};
          } else {
            throw std::invalid_argument(
                "rescale: raw samples cannot be rescaled; use a symbolic field spec");
          }
        },
        fs);
  };
  return {InitialCondition<S>{map(ic.u0), map(ic.ut0)},
          ScaleRecord<S>{p.alpha, p.beta}};
}

// M on its own uniform axis starting at x0 (= 0 for symmetric grids).
template <class S = double>
struct MProfile {
  S x0 = S(0);
  S dx = S(0);
  Vec<S> values;
  S at(S x) const { return interp_profile(values, x0, dx, x); }
};

// M(x) = f(x)/2 + (1/2) * integral of g from x to X, sampled on the grid
// nodes of [0, X] (plus a few guard nodes past X for interpolation).
template <class S>
MProfile<S> compute_M(const Vec<S>& f, const Vec<S>& g_samples, const Grid<S>& grid, S X,
                      S support_tol = S(1e-12)) {
  const Index n = grid.n_points;
  if (f.size() != n || g_samples.size() != n)
    throw std::invalid_argument("compute_M: field size does not match grid");
  if (!(X > S(0)) || X > grid.x_max)
    throw std::invalid_argument("compute_M: need 0 < X <= x_max");

  S worst = S(0);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(grid.coord(i)) < X) continue;
    worst = std::max(worst, std::abs(f[i]) + std::abs(g_samples[i]));
  }
  if (worst > support_tol)
    throw std::domain_error("compute_M: data not supported in |x| < X (max outside = " +
                            std::to_string(worst) + ")");

  Index i0 = 0;
  while (i0 < n && grid.coord(i0) < S(0)) ++i0;
  Index iend = i0;
  while (iend + 1 < n && grid.coord(iend) < X) ++iend;
  iend = std::min(n - 1, iend + 3);  // guard nodes keep the interpolation centred near X
  const Index m = iend - i0 + 1;
  if (m < 8) throw std::invalid_argument("compute_M: grid too coarse for the window [0, X]");

  MProfile<S> prof;
  prof.x0 = grid.coord(i0);
  prof.dx = grid.dx;
  const Vec<S> gseg = g_samples.segment(i0, m);
  Vec<S> C = cumulative_from_right(gseg, grid.dx);  // integral from x to the last guard node
  const S cX = interp_profile(C, prof.x0, prof.dx, X);
  prof.values = (f.segment(i0, m) + (C - cX)) / S(2);
  return prof;
}

// epsilon = integral of M over [X0, X].
template <class S>
S epsilon_of(const MProfile<S>& M, S X0, S X) {
  if (!(X0 < X)) throw std::invalid_argument("epsilon_of: need X0 < X");
  const Index panels = std::max<Index>(48, 2 * static_cast<Index>(std::ceil((X - X0) / M.dx)));
  return integrate_panels([&](S x) { return M.at(x); }, X0, X, panels);
}

template <class S = double>
struct TheoremInputs {
  S X = S(0);
  S X0 = S(0);
  S X1 = S(0);  // (X - X0) / 2
  S epsilon = S(0);
  MProfile<S> M;
  bool hypothesis_met = false;  // M >= 0 on (X0, X) and epsilon > 0
};

template <class S>
TheoremInputs<S> make_theorem_inputs(const Vec<S>& f, const Vec<S>& g_samples,
                                     const Grid<S>& grid, S X, S X0,
                                     S support_tol = S(1e-12)) {
  if (!(X0 > S(0) && X0 < X))
    throw std::invalid_argument("theorem inputs: need 0 < X0 < X");
  TheoremInputs<S> in;
  in.X = X;
  in.X0 = X0;
  in.X1 = (X - X0) / S(2);
  in.M = compute_M(f, g_samples, grid, X, support_tol);
  in.epsilon = epsilon_of(in.M, X0, X);
  S mmin = S(0), mscale = S(1);
  for (Index j = 0; j < in.M.values.size(); ++j) {
    const S x = in.M.x0 + S(j) * in.M.dx;
    mscale = std::max(mscale, std::abs(in.M.values[j]));
    if (x > X0 && x < X) mmin = std::min(mmin, in.M.values[j]);
  }
  in.hypothesis_met = mmin >= S(-1e-12) * mscale && in.epsilon > S(0);
  return in;
}

enum class CheckStatus { Pass, Fail, HypothesisUnmet };

template <class S = double>
struct InequalityCheck {
  std::string id;
  CheckStatus status = CheckStatus::Pass;
  S margin = S(0);  // passing means margin >= -tol_abs
};

template <class S = double>
struct MonitorReport {
  std::vector<S> times;  // check times, from X1 to the last uncontaminated snapshot
  std::vector<S> H, Hp, Hpp;
  S G0 = S(0);  // == epsilon
  std::vector<S> G1_lower;  // lower bound on the nonlinear term, per check time
  std::vector<S> c4_times, c4_direct, c4_lower;
  std::vector<InequalityCheck<S>> checks;
  S tol_abs = S(0);
  bool hypothesis_met = false;
};

namespace detail {

// u_x^2 cumulative on the endpoint-extended axis [x_min, x_max], so windows
// touching x_max never extrapolate.
template <class S>
Vec<S> uxsq_cumulative(const Vec<S>& ux, const Grid<S>& g) {
  const Index n = g.n_points;
  Vec<S> w(n + 1);
  w.head(n) = ux.square();
  w[n] = ux[0] * ux[0];
  return cumulative_from_left(w, g.dx);
}

}  // namespace detail

// Evaluate the divergence functional H(t) = int_{X1}^t (t-tau) K(tau) dtau,
// K(tau) = int_{tau+X0}^{tau+X} u(xi,tau) dxi, over a stack of uniformly
// spaced snapshots, together with the inequality checks:
//   C1  H(X1) = H'(X1) = 0
//   C2  H''(t) >= epsilon
//   C3  H''(t) >= 4 H(t)^2 / ((X-X0)^2 t^2)        for t > X1
//   C4  direct triple-integral G1 >= its lower bound (sampled times)
// Check times are the snapshot nodes in [X1, t*] where t* is the last time
// with t + X still inside the domain (no wrap-around contamination).
template <class S>
MonitorReport<S> monitor_H(const std::vector<FieldState<S>>& snaps, const Grid<S>& g,
                           const TheoremInputs<S>& in, Index c4_samples = 4) {
  if (g.kind != GridKind::Periodic1D)
    throw std::invalid_argument("monitor: periodic grids only");
  if (snaps.size() < 3)
    throw std::invalid_argument("monitor: need at least 3 snapshots");
  if (std::abs(snaps.front().t) > S(1e-12))
    throw std::invalid_argument("monitor: snapshot stack must start at t = 0");

  const S X = in.X, X0 = in.X0, X1 = in.X1, L = in.X - in.X0;
  const std::size_t ns = snaps.size();
  const S dt = (snaps.back().t - snaps.front().t) / S(ns - 1);
  const S tscale = std::max(S(1), snaps.back().t);
  for (std::size_t j = 0; j < ns; ++j)
    if (std::abs(snaps[j].t - S(j) * dt) > S(1e-9) * tscale)
      throw std::invalid_argument("monitor: snapshot times must be uniform");
  if (dt > L / S(20) * (S(1) + S(1e-12)))
    throw std::invalid_argument("monitor: snapshot spacing too coarse (need <= (X-X0)/20)");

  const auto j1 = static_cast<std::size_t>(std::llround(X1 / dt));
  if (j1 < 1 || j1 >= ns || std::abs(S(j1) * dt - X1) > S(1e-9) * std::max(S(1), X1))
    throw std::invalid_argument("monitor: X1 must fall on a snapshot node");

  std::size_t jmax = ns - 1;
  while (jmax > 0 && snaps[jmax].t + X > g.x_max + S(1e-12)) --jmax;
  if (jmax <= j1)
    throw std::runtime_error(
        "monitor: boundary contamination (support t + X leaves the domain before X1)");

  const Index px =
      std::max<Index>(48, 2 * static_cast<Index>(std::ceil(L / (S(2) * g.dx))) * 2);

  // per-snapshot ingredients
  std::vector<S> K(jmax + 1), W(jmax + 1);
  std::vector<Vec<S>> ux(jmax + 1);
  for (std::size_t j = 0; j <= jmax; ++j) {
    const S tj = snaps[j].t;
    const Vec<S>& u = snaps[j].u;
    K[j] = integrate_panels([&](S xi) { return sample_at(u, g, xi); }, tj + X0, tj + X, px);
    ux[j] = d1(u, g);
    W[j] = integrate_panels(
        [&](S xi) {
          const S w = sample_at(ux[j], g, xi);
          return (xi - tj - X0) * w * w;
        },
        tj + X0, tj + X, px);
  }

  MonitorReport<S> out;
  out.G0 = in.epsilon;
  out.hypothesis_met = in.hypothesis_met;
  for (std::size_t j = j1; j <= jmax; ++j) {
    const S tj = snaps[j].t;
    const Index m = static_cast<Index>(j - j1 + 1);
    Vec<S> hint(m), pint(m);
    for (Index i = 0; i < m; ++i) {
      const S tau = snaps[j1 + i].t;
      hint[i] = (tj - tau) * K[j1 + i];
      pint[i] = K[j1 + i];
    }
    out.times.push_back(tj);
    out.H.push_back(integrate_samples(hint, dt));
    out.Hp.push_back(integrate_samples(pint, dt));
    out.Hpp.push_back(K[j]);

    Vec<S> lint(static_cast<Index>(j + 1));
    for (std::size_t i = 0; i <= j; ++i) lint[static_cast<Index>(i)] = (tj - snaps[i].t) * W[i];
    out.G1_lower.push_back(integrate_samples(lint, dt) / (tj + X));
  }

  // sampled comparison of the triple-integral G1 against its lower bound
  const std::size_t span = jmax - j1;
  const auto nc = static_cast<std::size_t>(std::min<Index>(c4_samples, static_cast<Index>(span)));
  std::vector<std::size_t> cjs;
  for (std::size_t k = 1; k <= nc; ++k) {
    const std::size_t j = j1 + (span * k) / nc;
    if (cjs.empty() || cjs.back() != j) cjs.push_back(j);
  }
  for (std::size_t j : cjs) {
    const S t = snaps[j].t;
    std::vector<Vec<S>> P(j + 1);
    for (std::size_t m = 0; m <= j; ++m) P[m] = detail::uxsq_cumulative(ux[m], g);
    auto outer = [&](S x) {
      Vec<S> tau_int(static_cast<Index>(j + 1));
      for (std::size_t m = 0; m <= j; ++m) {
        const S tau = snaps[m].t;
        const S lo = x - t + tau;
        // the data is supported in |xi| <= tau + X; clip so sampling stays
        // inside the stored window
        const S hi = std::min(x + t - tau, tau + X);
        tau_int[static_cast<Index>(m)] =
            hi <= lo ? S(0)
                     : interp_profile(P[m], g.x_min, g.dx, hi) -
                           interp_profile(P[m], g.x_min, g.dx, lo);
      }
      return integrate_samples(tau_int, dt);
    };
    out.c4_times.push_back(t);
    out.c4_direct.push_back(integrate_panels(outer, t + X0, t + X, px));
    out.c4_lower.push_back(out.G1_lower[j - j1]);
  }

  S hpp_max = S(0);
  for (S v : out.Hpp) hpp_max = std::max(hpp_max, std::abs(v));
  out.tol_abs = S(1e-6) * std::max(S(1), hpp_max);

  auto add_check = [&](std::string id, S margin, bool hypothesis_bound) {
    InequalityCheck<S> c;
    c.id = std::move(id);
    c.margin = margin;
    if (hypothesis_bound && !in.hypothesis_met)
      c.status = CheckStatus::HypothesisUnmet;
    else
      c.status = margin >= -out.tol_abs ? CheckStatus::Pass : CheckStatus::Fail;
    out.checks.push_back(std::move(c));
  };

  add_check("C1", -std::max(std::abs(out.H.front()), std::abs(out.Hp.front())), false);

  S m2 = std::numeric_limits<S>::infinity();
  for (std::size_t i = 0; i < out.times.size(); ++i)
    m2 = std::min(m2, out.Hpp[i] - in.epsilon);
  add_check("C2", m2, true);

  S m3 = std::numeric_limits<S>::infinity();
  for (std::size_t i = 1; i < out.times.size(); ++i) {
    const S t = out.times[i];
    m3 = std::min(m3, out.Hpp[i] - S(4) * out.H[i] * out.H[i] / (L * L * t * t));
  }
  add_check("C3", m3, false);

  S m4 = std::numeric_limits<S>::infinity();
  for (std::size_t i = 0; i < out.c4_times.size(); ++i)
    m4 = std::min(m4, out.c4_direct[i] - out.c4_lower[i]);
  if (!out.c4_times.empty()) add_check("C4", m4, false);

  return out;
}

// F(t) = int_{X1}^t (t-tau) int (xi-tau-X0) u_x dxi dtau. Integrating the
// inner integral by parts kills the boundary terms (the weight vanishes at
// the lower limit, the field at the upper), leaving exactly -H(t).
template <class S>
S monitor_F(const std::vector<FieldState<S>>& snaps, const Grid<S>& g,
            const TheoremInputs<S>& in, S t) {
  if (snaps.size() < 3) throw std::invalid_argument("monitor_F: need snapshots");
  const S dt = (snaps.back().t - snaps.front().t) / S(snaps.size() - 1);
  const auto j1 = static_cast<std::size_t>(std::llround(in.X1 / dt));
  const auto jt = static_cast<std::size_t>(std::llround(t / dt));
  if (jt >= snaps.size() || std::abs(snaps[jt].t - t) > S(1e-9) * std::max(S(1), t))
    throw std::invalid_argument("monitor_F: t must fall on a snapshot node");
  if (jt < j1) throw std::invalid_argument("monitor_F: t must be >= X1");
  const Index px = std::max<Index>(
      48, 2 * static_cast<Index>(std::ceil((in.X - in.X0) / (S(2) * g.dx))) * 2);
  Vec<S> rows(static_cast<Index>(jt - j1 + 1));
  for (std::size_t m = j1; m <= jt; ++m) {
    const S tau = snaps[m].t;
    const Vec<S> ux = d1(snaps[m].u, g);
    const S inner = integrate_panels(
        [&](S xi) { return (xi - tau - in.X0) * sample_at(ux, g, xi); }, tau + in.X0,
        tau + in.X, px);
    rows[static_cast<Index>(m - j1)] = (t - tau) * inner;
  }
  return integrate_samples(rows, dt);
}

template <class S>
S J_closed_form(S t, S X, S X0) {
  const S L = X - X0;
  return L * L * t * t / S(4);
}

// The defining double integral of J, done numerically without simplification.
template <class S>
S J_by_quadrature(S t, S X, S X0, Index panels = 64) {
  return integrate_panels(
      [&](S tau) {
        return integrate_panels([&](S xi) { return (t - tau) * (xi - tau - X0); },
                                tau + X0, tau + X, Index(16));
      },
      S(0), t, panels);
}

// Re-evaluate (u, u_t)(., t) as fresh data: support radius grows with the
// normalized propagation speed (X_t = X + t), the inner radius keeps its
// relative position. Returns (t, epsilon_t) until the support leaves the
// domain. The interesting output is the sign: negative-M data eventually
// turns epsilon positive.
template <class S>
std::vector<std::pair<S, S>> epsilon_timeline(const std::vector<FieldState<S>>& snaps,
                                              const Grid<S>& g, S X_initial,
                                              S x0_fraction,
                                              S support_tol = S(1e-8)) {
  if (!(x0_fraction > S(0) && x0_fraction < S(1)))
    throw std::invalid_argument("epsilon_timeline: x0_fraction must be in (0, 1)");
  std::vector<std::pair<S, S>> out;
  for (const auto& s : snaps) {
    const S Xt = X_initial + s.t;
    if (Xt > g.x_max) break;
    try {
      const MProfile<S> M = compute_M(s.u, s.v, g, Xt, support_tol);
      out.emplace_back(s.t, epsilon_of(M, x0_fraction * Xt, Xt));
    } catch (const std::domain_error&) {
      break;  // integrator noise outside the light cone near blowup; stop here
    }
  }
  return out;
}

// Uniform snapshot schedule with X1 exactly on a node: the monitor's
// quadratures integrate over the snapshot stack and need aligned times.
template <class S>
std::vector<S> monitor_schedule(S X1, S t_end, S dt_target) {
  if (!(X1 > S(0)) || !(t_end > X1) || !(dt_target > S(0)))
    throw std::invalid_argument("monitor_schedule: need 0 < X1 < t_end and dt_target > 0");
  const auto m = static_cast<long>(std::ceil(X1 / dt_target - S(1e-12)));
  const S dt = X1 / S(std::max(1L, m));
  const auto last = static_cast<long>(std::floor(t_end / dt + S(1e-12)));
  std::vector<S> times;
  times.reserve(last + 1);
  for (long j = 0; j <= last; ++j) times.push_back(S(j) * dt);
  return times;
}

}  // namespace blowup
