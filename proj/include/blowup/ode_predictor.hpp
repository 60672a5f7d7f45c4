#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blowup/dopri.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

// Second-derivative data (b, b') = (u_xx, u_txx) at a critical point of u.
// There the PDE closes into b'' = 2*alpha*b^2 with conserved
// c = b'^2/2 - (2/3)*alpha*b^3.
template <class S = double>
struct CriticalData {
  S alpha = S(1);
  S b0 = S(0);
  S db0 = S(0);
};

enum class Prop1Case { DivergesUp, CollapsesThenDiverges, DivergesFromRest, Constant };

template <class S = double>
struct Prop1Verdict {
  Prop1Case case_tag = Prop1Case::Constant;
  S c = S(0);
  std::optional<S> t_plus;   // time to reach +infinity from b0 going up
  std::optional<S> t_minus;  // time to fall from b0 to the turning point
  std::optional<S> b_star;   // turning point (zero of b'^2)
  std::optional<S> t_total;  // overall time to divergence
  bool marginal = false;     // db0 < 0 with c == 0: b decays toward 0, never diverges
};

template <class S>
S energy_constant(const CriticalData<S>& cd) {
  return cd.db0 * cd.db0 / S(2) - S(2) / S(3) * cd.alpha * cd.b0 * cd.b0 * cd.b0;
}

namespace detail {

template <class S>
void require_predictable(const CriticalData<S>& cd) {
  if (!(cd.alpha > S(0)))
    throw std::invalid_argument("ode predictor: alpha must be positive");
  if (!std::isfinite(cd.b0) || !std::isfinite(cd.db0))
    throw std::invalid_argument("ode predictor: non-finite critical data");
}

}  // namespace detail

// Time for b to run from b0 to +infinity along the upper branch
// b' = +sqrt((4/3) alpha b^3 + 2c). Requires db0 >= 0 (start on the upper
// branch) and (b0, db0) != (0, 0).
//
// The integral is split at max(b0+1, 1). On the finite part b = b0 + w^2
// removes the endpoint singularity; the radicand is expanded about b0 so the
// db0^2 term enters exactly and never cancels. On the tail b = 1/w^2 gives a
// bounded integrand with the curvature constant in the denominator.
template <class S>
S t_plus(const CriticalData<S>& cd, S rel_tol = S(1e-10)) {
  detail::require_predictable(cd);
  if (cd.db0 < S(0))
    throw std::domain_error("t_plus: trajectory starts on the descending branch");
  if (cd.db0 == S(0) && cd.b0 == S(0))
    throw std::domain_error("t_plus: the rest solution never diverges");
  const S a = cd.alpha, b0 = cd.b0, d = cd.db0;
  const S c = energy_constant(cd);
  const S split = std::max(b0 + S(1), S(1));

  const S w_end = std::sqrt(split - b0);
  S finite;
  if (d == S(0)) {
    auto g = [a, b0](S w) {
      const S w2 = w * w;
      const S q = S(3) * b0 * b0 + S(3) * b0 * w2 + w2 * w2;
      return S(2) / std::sqrt(S(4) / S(3) * a * q);
    };
    finite = integrate_adaptive(g, S(0), w_end, rel_tol);
  } else {
    auto g = [a, b0, d](S w) {
      const S w2 = w * w;
      const S q = w2 * (S(3) * b0 * b0 + S(3) * b0 * w2 + w2 * w2);
      return S(2) * w / std::sqrt(d * d + S(4) / S(3) * a * q);
    };
    finite = integrate_adaptive(g, S(0), w_end, rel_tol);
  }

  auto tail_g = [a, c](S w) {
    const S w3 = w * w * w;
    return S(2) / std::sqrt(S(4) / S(3) * a + S(2) * c * w3 * w3);
  };
  const S tail = integrate_adaptive(tail_g, S(0), S(1) / std::sqrt(split), rel_tol);
  return finite + tail;
}

// Turning point and the time to fall to it from b0 along the descending
// branch. Requires db0 < 0 and c != 0; c == 0 is the marginal decay-to-zero
// trajectory with no turning point.
template <class S>
std::pair<S, S> t_minus_and_bstar(const CriticalData<S>& cd, S rel_tol = S(1e-10)) {
  detail::require_predictable(cd);
  if (!(cd.db0 < S(0)))
    throw std::domain_error("t_minus: trajectory does not start on the descending branch");
  const S c = energy_constant(cd);
  if (c == S(0))
    throw std::domain_error("t_minus: c = 0 decays to the rest solution (marginal case)");
  const S a = cd.alpha;
  const S bs = std::cbrt(S(-3) * c / (S(2) * a));
  // b = b* + w^2; the factored radicand is exactly zero at the turning point
  auto g = [a, bs](S w) {
    const S w2 = w * w;
    const S q = S(3) * bs * bs + S(3) * bs * w2 + w2 * w2;
    return S(2) / std::sqrt(S(4) / S(3) * a * q);
  };
  const S t = integrate_adaptive(g, S(0), std::sqrt(cd.b0 - bs), rel_tol);
  return {t, bs};
}

// Full four-way trichotomy of the reduced dynamics, with divergence times.
template <class S>
Prop1Verdict<S> classify(const CriticalData<S>& cd, S rel_tol = S(1e-10)) {
  detail::require_predictable(cd);
  Prop1Verdict<S> v;
  v.c = energy_constant(cd);
  if (cd.db0 > S(0)) {
    v.case_tag = Prop1Case::DivergesUp;
    v.t_plus = t_plus(cd, rel_tol);
    v.t_total = v.t_plus;
  } else if (cd.db0 < S(0)) {
    v.case_tag = Prop1Case::CollapsesThenDiverges;
    if (v.c == S(0)) {
      v.marginal = true;  // slides down the homoclinic branch, b -> 0 as t -> inf
      v.b_star = S(0);
    } else {
      auto [tm, bs] = t_minus_and_bstar(cd, rel_tol);
      v.t_minus = tm;
      v.b_star = bs;
      v.t_plus = t_plus(CriticalData<S>{cd.alpha, bs, S(0)}, rel_tol);
      v.t_total = tm + *v.t_plus;
    }
  } else if (cd.b0 != S(0)) {
    v.case_tag = Prop1Case::DivergesFromRest;
    v.t_plus = t_plus(cd, rel_tol);
    v.t_total = v.t_plus;
  } else {
    v.case_tag = Prop1Case::Constant;
  }
  return v;
}

enum class ReducedEnd { ReachedTEnd, CrossedThreshold, Breakdown };

template <class S = double>
struct ReducedTrajectory {
  std::vector<S> t, b, db;
  ReducedEnd end = ReducedEnd::ReachedTEnd;
  std::optional<S> crossing_time;  // refined time of b == blow_threshold
  long steps = 0;
};

// Direct adaptive integration of b'' = 2 alpha b^2, for cross-checking the
// quadrature times and for tracking runs. Records (t, b, b') at accepted
// steps, or at `sample_times` (dense output) when given. Stops when b crosses
// blow_threshold upward.
template <class S>
ReducedTrajectory<S> integrate_reduced_ode(const CriticalData<S>& cd, S t_end,
                                           S blow_threshold,
                                           const std::vector<S>& sample_times = {},
                                           S rel_tol = S(1e-12), S abs_tol = S(1e-12)) {
  detail::require_predictable(cd);
  if (!(blow_threshold > std::abs(cd.b0)))
    throw std::invalid_argument("reduced ode: blow_threshold must exceed |b0|");
  if (!(t_end > S(0))) throw std::invalid_argument("reduced ode: t_end must be positive");

  const S a = cd.alpha;
  auto rhs = [a](S, const Vec<S>& y, Vec<S>& dy) {
    dy[0] = y[1];
    dy[1] = S(2) * a * y[0] * y[0];
  };

  ReducedTrajectory<S> out;
  Vec<S> y(2), f0(2);
  y << cd.b0, cd.db0;
  rhs(S(0), y, f0);

  auto record = [&](S t, S b, S db) {
    out.t.push_back(t);
    out.b.push_back(b);
    out.db.push_back(db);
  };
  std::size_t next_sample = 0;
  if (sample_times.empty()) record(S(0), y[0], y[1]);

  const S dt_min = S(1e-14) * std::max(S(1), t_end);
  S t = S(0), dt = S(1e-6) * t_end;
  while (t < t_end) {
    dt = std::min(dt, t_end - t);
    auto st = dopri_step(rhs, t, y, f0, dt, rel_tol, abs_tol, t_end);
    if (!st.accepted) {
      if (dt <= dt_min * (S(1) + S(1e-9))) {
        out.end = ReducedEnd::Breakdown;
        if (sample_times.empty()) record(t, y[0], y[1]);
        return out;
      }
      dt = std::max(st.dt_next, dt_min);
      continue;
    }
    const S t1 = t + dt;
    ++out.steps;

    auto value_at = [&](S tq) {
      return hermite_interp(y, f0, st.y, st.f_end, dt, (tq - t) / dt);
    };
    const bool crossed = st.y[0] >= blow_threshold;
    S t_cross = t1;
    if (crossed) {
      // bisect the Hermite interpolant for the first upward crossing
      S lo = S(0), hi = S(1);
      for (int it = 0; it < 80 && (hi - lo) * dt > S(1e-13) * std::max(S(1), t1); ++it) {
        const S mid = (lo + hi) / S(2);
        (value_at(t + mid * dt)[0] >= blow_threshold ? hi : lo) = mid;
      }
      t_cross = t + hi * dt;
      out.crossing_time = t_cross;
    }

    while (next_sample < sample_times.size() && sample_times[next_sample] <= t1 &&
           sample_times[next_sample] <= t_cross) {
      const S tq = sample_times[next_sample];
      const Vec<S> yq = tq >= t1 ? st.y : value_at(tq);
      record(tq, yq[0], yq[1]);
      ++next_sample;
    }

    if (crossed) {
      const Vec<S> yc = value_at(t_cross);
      if (sample_times.empty()) record(t_cross, yc[0], yc[1]);
      out.end = ReducedEnd::CrossedThreshold;
      return out;
    }
    y = st.y;
    f0 = st.f_end;
    t = t1;
    dt = std::max(st.dt_next, dt_min);
    if (sample_times.empty()) record(t, y[0], y[1]);
  }
  out.end = ReducedEnd::ReachedTEnd;
  return out;
}

// Exact diverging solution of the reduced equation with blowup instant t0:
// f(t) = 3 / (2 alpha (t0 - t)^2), and its derivative.
template <class S = double>
struct OracleValue {
  S f;
  S fp;
};

template <class S>
OracleValue<S> closed_form_oracle(S alpha, S t0, S t) {
  if (!(alpha > S(0)) || !(t0 > S(0)))
    throw std::invalid_argument("closed_form_oracle: alpha and t0 must be positive");
  if (!(t >= S(0)) || !(t < t0))
    throw std::domain_error("closed_form_oracle: requires 0 <= t < t0");
  const S s = t0 - t;
  return {S(3) / (S(2) * alpha * s * s), S(3) / (alpha * s * s * s)};
}

}  // namespace blowup
