#pragma once

#include <stdexcept>

#include "blowup/types.hpp"

namespace blowup {

enum class GridKind { Periodic1D, Radial3D };

// Uniform spatial grid. Periodic grids store n samples on [x_min, x_max) with
// the endpoint identified; radial grids are endpoint-inclusive with r = 0 at
// index 0.
template <class S = double>
struct Grid {
  GridKind kind = GridKind::Periodic1D;
  Index n_points = 0;
  S x_min = S(0);
  S x_max = S(0);
  S dx = S(0);

  // On symmetric periodic domains (x_min == -x_max) coordinates are computed
  // as (2i - n) * dx/2 so that coord(n - i) == -coord(i) bitwise. Mirror
  // symmetry of the data then survives floating point exactly.
  S coord(Index i) const {
    if (kind == GridKind::Periodic1D && x_min == -x_max)
      return S(2 * i - n_points) * (dx / S(2));
    return x_min + S(i) * dx;
  }

  Vec<S> coords() const {
    Vec<S> x(n_points);
    for (Index i = 0; i < n_points; ++i) x[i] = coord(i);
    return x;
  }

  Index mirror(Index i) const {
    return kind == GridKind::Periodic1D ? (n_points - i) % n_points : i;
  }
};

template <class S = double>
Grid<S> build_grid(GridKind kind, Index n_points, S x_min, S x_max) {
  if (n_points < 16)
    throw std::invalid_argument("grid: n_points must be at least 16");
  if (!(x_max > x_min))
    throw std::invalid_argument("grid: x_max must exceed x_min");
  if (kind == GridKind::Radial3D && x_min != S(0))
    throw std::invalid_argument("grid: radial domain must start at r = 0");
  Grid<S> g;
  g.kind = kind;
  g.n_points = n_points;
  g.x_min = x_min;
  g.x_max = x_max;
  g.dx = kind == GridKind::Periodic1D ? (x_max - x_min) / S(n_points)
                                      : (x_max - x_min) / S(n_points - 1);
  return g;
}

// Coefficients of u_tt = alpha*(u_x)^2 + beta*u_xx (beta is the squared
// propagation speed of the linearised equation).
template <class S = double>
struct Parameters {
  S alpha = S(0);
  S beta = S(0);
};

template <class S>
void validate(const Parameters<S>& p) {
  if (!(p.alpha >= S(0)) || !(p.beta >= S(0)))
    throw std::invalid_argument("parameters: alpha and beta must be non-negative");
}

// First-order state (u, v = u_t) at a fixed time.
template <class S = double>
struct FieldState {
  S t = S(0);
  Vec<S> u;
  Vec<S> v;
};

}  // namespace blowup
