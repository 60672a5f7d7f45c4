#pragma once

#include <cmath>

#include "blowup/types.hpp"

namespace blowup {

namespace detail {

// Dormand-Prince 5(4) coefficients. The last row of a[] equals the 5th-order
// weights, so k7 = f(t+dt, y5) is reusable as the next step's first stage.
template <class S>
struct DopriTableau {
  static constexpr S c2 = S(1) / S(5), c3 = S(3) / S(10), c4 = S(4) / S(5),
                     c5 = S(8) / S(9);
  static constexpr S a21 = S(1) / S(5);
  static constexpr S a31 = S(3) / S(40), a32 = S(9) / S(40);
  static constexpr S a41 = S(44) / S(45), a42 = S(-56) / S(15), a43 = S(32) / S(9);
  static constexpr S a51 = S(19372) / S(6561), a52 = S(-25360) / S(2187),
                     a53 = S(64448) / S(6561), a54 = S(-212) / S(729);
  static constexpr S a61 = S(9017) / S(3168), a62 = S(-355) / S(33),
                     a63 = S(46732) / S(5247), a64 = S(49) / S(176),
                     a65 = S(-5103) / S(18656);
  static constexpr S b1 = S(35) / S(384), b3 = S(500) / S(1113), b4 = S(125) / S(192),
                     b5 = S(-2187) / S(6784), b6 = S(11) / S(84);
  // b5th - b4th, the embedded error weights
  static constexpr S e1 = S(71) / S(57600), e3 = S(-71) / S(16695), e4 = S(71) / S(1920),
                     e5 = S(-17253) / S(339200), e6 = S(22) / S(525), e7 = S(-1) / S(40);
};

}  // namespace detail

template <class S>
struct DopriStep {
  Vec<S> y;       // 5th-order candidate at t + dt
  Vec<S> f_end;   // rhs at (t + dt, y); first stage of the next step when accepted
  S err;          // mixed max norm, accept iff err <= 1
  S dt_next;      // controller proposal, capped at dt_max
  bool accepted;
};

// One explicit Dormand-Prince 5(4) attempt. `f_start` must hold rhs(t, y);
// on acceptance the caller reuses `f_end` as the next `f_start`. `rhs` is
// called as rhs(t, y, dydt) and `evals` (if given) counts those calls.
template <class S, class Rhs>
DopriStep<S> dopri_step(Rhs&& rhs, S t, const Vec<S>& y, const Vec<S>& f_start, S dt,
                        S rel_tol, S abs_tol, S dt_max, long* evals = nullptr) {
  using T = detail::DopriTableau<S>;
  const Index n = y.size();
  Vec<S> k2(n), k3(n), k4(n), k5(n), k6(n), ytmp(n);

  ytmp = y + dt * (T::a21 * f_start);
  rhs(t + T::c2 * dt, ytmp, k2);
  ytmp = y + dt * (T::a31 * f_start + T::a32 * k2);
  rhs(t + T::c3 * dt, ytmp, k3);
  ytmp = y + dt * (T::a41 * f_start + T::a42 * k2 + T::a43 * k3);
  rhs(t + T::c4 * dt, ytmp, k4);
  ytmp = y + dt * (T::a51 * f_start + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
  rhs(t + T::c5 * dt, ytmp, k5);
  ytmp = y + dt * (T::a61 * f_start + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
  rhs(t + dt, ytmp, k6);

  DopriStep<S> out;
  out.y = y + dt * (T::b1 * f_start + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
  out.f_end.resize(n);
  rhs(t + dt, out.y, out.f_end);
  if (evals) *evals += 6;

  // elementwise |b5 - b4| defect against the mixed tolerance
  S err = S(0);
  for (Index i = 0; i < n; ++i) {
    const S e = dt * (T::e1 * f_start[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                      T::e6 * k6[i] + T::e7 * out.f_end[i]);
    const S scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.y[i]));
    const S r = std::abs(e) / scale;
    if (r > err || !(r == r)) err = r;  // NaN poisons the norm
  }
  out.err = err;

  S factor;
  if (!std::isfinite(err)) {
    out.accepted = false;
    factor = S(0.2);
  } else {
    out.accepted = err <= S(1);
    factor = err == S(0) ? S(5)
                         : std::min(S(5), std::max(S(0.2), S(0.9) * std::pow(err, S(-0.2))));
  }
  out.dt_next = std::min(dt * factor, dt_max);
  return out;
}

// Cubic Hermite interpolation across an accepted step, theta in [0, 1].
template <class S>
Vec<S> hermite_interp(const Vec<S>& y0, const Vec<S>& f0, const Vec<S>& y1, const Vec<S>& f1,
                      S h, S theta) {
  const S t2 = theta * theta, t3 = t2 * theta;
  const S h00 = S(2) * t3 - S(3) * t2 + S(1);
  const S h10 = t3 - S(2) * t2 + theta;
  const S h01 = S(-2) * t3 + S(3) * t2;
  const S h11 = t3 - t2;
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

}  // namespace blowup
