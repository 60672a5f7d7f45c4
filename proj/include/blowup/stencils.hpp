#pragma once

#include <cmath>
#include <stdexcept>

#include "blowup/grid.hpp"

namespace blowup {

namespace detail {

// Fourth-order centred stencils, written so mirrored input produces exactly
// mirrored (negated/equal) output in floating point: the plus/minus neighbour
// pairs are combined before anything else touches them.
template <class S>
inline S d1_point(S fm2, S fm1, S fp1, S fp2, S inv12dx) {
  return (S(8) * (fp1 - fm1) + (fm2 - fp2)) * inv12dx;
}

template <class S>
inline S d2_point(S fm2, S fm1, S f0, S fp1, S fp2, S inv12dx2) {
  return (S(16) * (fp1 + fm1) - (fp2 + fm2) - S(30) * f0) * inv12dx2;
}

}  // namespace detail

// First spatial derivative, 4th order. Periodic grids wrap; radial grids use
// even reflection across r = 0 and one-sided stencils at the outer edge.
template <class S>
Vec<S> d1(const Vec<S>& f, const Grid<S>& g) {
  const Index n = g.n_points;
  if (f.size() != n) throw std::invalid_argument("d1: field size does not match grid");
  const S inv = S(1) / (S(12) * g.dx);
  Vec<S> r(n);
  const Index m = n - 4;
  r.segment(2, m) = (S(8) * (f.segment(3, m) - f.segment(1, m)) +
                     (f.segment(0, m) - f.segment(4, m))) *
                    inv;
  if (g.kind == GridKind::Periodic1D) {
    for (Index i : {Index(0), Index(1), n - 2, n - 1}) {
      r[i] = detail::d1_point(f[(i - 2 + n) % n], f[(i - 1 + n) % n], f[(i + 1) % n],
                              f[(i + 2) % n], inv);
    }
  } else {
    r[0] = S(0);  // even reflection: the +/-1 and +/-2 pairs cancel exactly
    r[1] = detail::d1_point(f[1], f[0], f[2], f[3], inv);
    r[n - 2] = (S(3) * f[n - 1] + S(10) * f[n - 2] - S(18) * f[n - 3] + S(6) * f[n - 4] -
                f[n - 5]) *
               inv;
    r[n - 1] = (S(25) * f[n - 1] - S(48) * f[n - 2] + S(36) * f[n - 3] - S(16) * f[n - 4] +
                S(3) * f[n - 5]) *
               inv;
  }
  return r;
}

// Second spatial derivative, 4th order, same boundary treatment as d1.
template <class S>
Vec<S> d2(const Vec<S>& f, const Grid<S>& g) {
  const Index n = g.n_points;
  if (f.size() != n) throw std::invalid_argument("d2: field size does not match grid");
  const S inv = S(1) / (S(12) * g.dx * g.dx);
  Vec<S> r(n);
  const Index m = n - 4;
  r.segment(2, m) = (S(16) * (f.segment(3, m) + f.segment(1, m)) -
                     (f.segment(4, m) + f.segment(0, m)) - S(30) * f.segment(2, m)) *
                    inv;
  if (g.kind == GridKind::Periodic1D) {
    for (Index i : {Index(0), Index(1), n - 2, n - 1}) {
      r[i] = detail::d2_point(f[(i - 2 + n) % n], f[(i - 1 + n) % n], f[i], f[(i + 1) % n],
                              f[(i + 2) % n], inv);
    }
  } else {
    r[0] = detail::d2_point(f[2], f[1], f[0], f[1], f[2], inv);
    r[1] = detail::d2_point(f[1], f[0], f[1], f[2], f[3], inv);
    r[n - 2] = (S(11) * f[n - 1] - S(20) * f[n - 2] + S(6) * f[n - 3] + S(4) * f[n - 4] -
                f[n - 5]) *
               inv;
    r[n - 1] = (S(35) * f[n - 1] - S(104) * f[n - 2] + S(114) * f[n - 3] - S(56) * f[n - 4] +
                S(11) * f[n - 5]) *
               inv;
  }
  return r;
}

namespace detail {

// Cubic Lagrange kernel on the 4 samples around local offset s in [0, 1).
template <class S>
inline S lagrange4(S fm1, S f0, S fp1, S fp2, S s) {
  const S a = -s * (s - S(1)) * (s - S(2)) / S(6);
  const S b = (s + S(1)) * (s - S(1)) * (s - S(2)) / S(2);
  const S c = -(s + S(1)) * s * (s - S(2)) / S(2);
  const S d = (s + S(1)) * s * (s - S(1)) / S(6);
  return a * fm1 + b * f0 + c * fp1 + d * fp2;
}

}  // namespace detail

// Cubic interpolation of grid samples at an arbitrary point. Periodic grids
// wrap around the domain; bounded grids clamp the stencil at the ends.
template <class S>
S sample_at(const Vec<S>& f, const Grid<S>& g, S x) {
  const Index n = g.n_points;
  if (f.size() != n) throw std::invalid_argument("sample_at: field size does not match grid");
  if (g.kind == GridKind::Periodic1D) {
    const S length = g.x_max - g.x_min;
    S th = (x - g.x_min) / g.dx;
    const S nper = length / g.dx;  // == n up to round-off
    th = th - std::floor(th / nper) * nper;
    Index j = static_cast<Index>(std::floor(th));
    if (j < 0) j = 0;
    if (j >= n) j -= n;
    const S s = th - S(j);
    return detail::lagrange4(f[(j - 1 + n) % n], f[j], f[(j + 1) % n], f[(j + 2) % n], s);
  }
  S th = (x - g.x_min) / g.dx;
  Index j = static_cast<Index>(std::floor(th));
  if (j < 1) j = 1;
  if (j > n - 3) j = n - 3;
  const S s = th - S(j);
  return detail::lagrange4(f[j - 1], f[j], f[j + 1], f[j + 2], s);
}

// Same kernel for a profile on its own uniform axis (x0 + i*dx), clamped.
template <class S>
S interp_profile(const Vec<S>& f, S x0, S dx, S x) {
  const Index n = f.size();
  if (n < 4) throw std::invalid_argument("interp_profile: need at least 4 samples");
  S th = (x - x0) / dx;
  Index j = static_cast<Index>(std::floor(th));
  if (j < 1) j = 1;
  if (j > n - 3) j = n - 3;
  const S s = th - S(j);
  return detail::lagrange4(f[j - 1], f[j], f[j + 1], f[j + 2], s);
}

}  // namespace blowup
