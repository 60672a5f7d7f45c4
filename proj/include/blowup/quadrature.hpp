#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "blowup/types.hpp"

namespace blowup {

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (this is the classic
// QUADPACK dqk15 rule). The embedded 7-point Gauss value supplies the error
// estimate.
template <class S>
struct GK15 {
  static constexpr int kn = 8;  // non-negative Kronrod abscissae
  static constexpr S xk[kn] = {
      S(0.991455371120812639206854697526329L), S(0.949107912342758524526189684047851L),
      S(0.864864423359769072789712788640926L), S(0.741531185599394439863864773280788L),
      S(0.586087235467691130294144838258730L), S(0.405845151377397166906606412076961L),
      S(0.207784955007898467600689403773245L), S(0.0L)};
  static constexpr S wk[kn] = {
      S(0.022935322010529224963732008058970L), S(0.063092092629978553290700663189204L),
      S(0.104790010322250183839876322541518L), S(0.140653259715525918745189590510238L),
      S(0.169004726639267902826583426598550L), S(0.190350578064785409913256402421014L),
      S(0.204432940075298892414161999234649L), S(0.209482141084727828012999174891714L)};
  static constexpr S wg[4] = {
      S(0.129484966168869693270611432679082L), S(0.279705391489276667901467771423780L),
      S(0.381830050505118944950369775488975L), S(0.417959183673469387755102040816327L)};
};

template <class S, class F>
std::pair<S, S> gk15_panel(F& f, S a, S b) {
  using R = GK15<S>;
  const S h = (b - a) / S(2);
  const S mid = (a + b) / S(2);
  S ik = S(0), ig = S(0);
  for (int i = 0; i < R::kn - 1; ++i) {
    const S off = h * R::xk[i];
    const S sum = f(mid - off) + f(mid + off);
    ik += R::wk[i] * sum;
    if (i % 2 == 1) ig += R::wg[i / 2] * sum;
  }
  const S fm = f(mid);
  ik += R::wk[R::kn - 1] * fm;
  ig += R::wg[3] * fm;
  return {ik * h, std::abs(ik - ig) * std::abs(h)};
}

template <class S, class F>
S gk15_adapt(F& f, S a, S b, S tol, int depth) {
  auto [value, err] = gk15_panel(f, a, b);
  if (err <= tol || !((b - a) > S(0))) return value;
  if (depth >= 60)
    throw std::runtime_error("quadrature failed to converge");
  const S m = a + (b - a) / S(2);
  const S half = tol / S(2);
  return gk15_adapt(f, a, m, half, depth + 1) + gk15_adapt(f, m, b, half, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration to a relative tolerance. Intended for
// integrands that are already smooth (callers remove inverse-square-root
// endpoint singularities by substitution before coming here).
template <class S, class F>
S integrate_adaptive(F&& f, S a, S b, S rel_tol, S abs_floor = S(0)) {
  if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: bad interval");
  if (a == b) return S(0);
  auto [rough, err0] = detail::gk15_panel(f, a, b);
  S tol = std::max(rel_tol * std::abs(rough), abs_floor);
  if (tol == S(0)) tol = abs_floor > S(0) ? abs_floor : rel_tol;
  if (err0 <= tol) return rough;
  // one refinement of the scale estimate before committing to a tolerance
  const S m = a + (b - a) / S(2);
  auto [l, le] = detail::gk15_panel(f, a, m);
  auto [r, re] = detail::gk15_panel(f, m, b);
  const S scale = std::max(std::abs(l + r), std::abs(rough));
  tol = std::max(rel_tol * scale, abs_floor);
  if (le + re <= tol) return l + r;
  return detail::gk15_adapt(f, a, m, tol / S(2), 1) +
         detail::gk15_adapt(f, m, b, tol / S(2), 1);
}

// Composite Simpson over uniformly spaced samples (3/8 rule absorbs an odd
// final panel). Fourth order for smooth data.
template <class S>
S integrate_samples(const Vec<S>& y, S dx) {
  const Index m = y.size() - 1;  // interval count
  if (m < 1) return S(0);
  if (m == 1) return dx * (y[0] + y[1]) / S(2);
  S total = S(0);
  Index even = m;
  if (m % 2 == 1) {
    if (m == 3) {
      return dx * S(3) / S(8) * (y[0] + S(3) * y[1] + S(3) * y[2] + y[3]);
    }
    even = m - 3;
    const Index a = even;
    total += dx * S(3) / S(8) * (y[a] + S(3) * y[a + 1] + S(3) * y[a + 2] + y[a + 3]);
  }
  S odd_sum = S(0), even_sum = S(0);
  for (Index i = 1; i < even; i += 2) odd_sum += y[i];
  for (Index i = 2; i < even; i += 2) even_sum += y[i];
  total += dx / S(3) * (y[0] + S(4) * odd_sum + S(2) * even_sum + y[even]);
  return total;
}

// Composite Simpson of a callable over [a, b] with a fixed even panel count.
template <class S, class F>
S integrate_panels(F&& f, S a, S b, Index panels) {
  if (panels < 2) panels = 2;
  if (panels % 2 == 1) ++panels;
  const S h = (b - a) / S(panels);
  S odd_sum = S(0), even_sum = S(0);
  for (Index i = 1; i < panels; i += 2) odd_sum += f(a + S(i) * h);
  for (Index i = 2; i < panels; i += 2) even_sum += f(a + S(i) * h);
  return h / S(3) * (f(a) + S(4) * odd_sum + S(2) * even_sum + f(b));
}

namespace detail {

// Per-interval integrals from cubic interpolation: 4th order, no even/odd
// panel alternation, which keeps cumulative integrals smooth.
template <class S>
Vec<S> interval_integrals(const Vec<S>& y, S dx) {
  const Index m = y.size() - 1;
  if (m < 3) throw std::invalid_argument("cumulative integral: need at least 4 samples");
  Vec<S> I(m);
  I[0] = dx / S(24) * (S(9) * y[0] + S(19) * y[1] - S(5) * y[2] + y[3]);
  for (Index i = 1; i < m - 1; ++i)
    I[i] = dx / S(24) * (-y[i - 1] + S(13) * y[i] + S(13) * y[i + 1] - y[i + 2]);
  I[m - 1] = dx / S(24) * (S(9) * y[m] + S(19) * y[m - 1] - S(5) * y[m - 2] + y[m - 3]);
  return I;
}

}  // namespace detail

// C[i] = integral from x_i to the last sample.
template <class S>
Vec<S> cumulative_from_right(const Vec<S>& y, S dx) {
  const Vec<S> I = detail::interval_integrals(y, dx);
  Vec<S> C(y.size());
  C[y.size() - 1] = S(0);
  for (Index i = y.size() - 2; i >= 0; --i) C[i] = C[i + 1] + I[i];
  return C;
}

// C[i] = integral from the first sample to x_i.
template <class S>
Vec<S> cumulative_from_left(const Vec<S>& y, S dx) {
  const Vec<S> I = detail::interval_integrals(y, dx);
  Vec<S> C(y.size());
  C[0] = S(0);
  for (Index i = 1; i < y.size(); ++i) C[i] = C[i - 1] + I[i - 1];
  return C;
}

}  // namespace blowup
