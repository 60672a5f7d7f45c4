#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>

#include "blowup/grid.hpp"

namespace blowup {

struct ZeroSpec {};

// amplitude * exp(-k * (x - center)^2), k > 0
template <class S = double>
struct GaussianSpec {
  S amplitude = S(0);
  S k = S(1);
  S center = S(0);
};

// coeff * x^2
template <class S = double>
struct QuadraticSpec {
  S coeff = S(0);
};

// raw samples, one per grid point
template <class S = double>
struct SamplesSpec {
  Vec<S> values;
};

template <class S = double>
using FieldSpec = std::variant<ZeroSpec, GaussianSpec<S>, QuadraticSpec<S>, SamplesSpec<S>>;

template <class S = double>
struct InitialCondition {
  FieldSpec<S> u0 = ZeroSpec{};
  FieldSpec<S> ut0 = ZeroSpec{};
};

template <class S>
Vec<S> sample_spec(const FieldSpec<S>& spec, const Grid<S>& grid) {
  const Index n = grid.n_points;
  return std::visit(
      [&](const auto& s) -> Vec<S> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZeroSpec>) {
          return Vec<S>::Zero(n);
        } else if constexpr (std::is_same_v<T, GaussianSpec<S>>) {
          if (!(s.k > S(0)))
            throw std::invalid_argument("initial condition: gaussian width k must be positive");
          Vec<S> f(n);
          for (Index i = 0; i < n; ++i) {
            const S d = grid.coord(i) - s.center;
            f[i] = s.amplitude * std::exp(-s.k * d * d);
          }
          return f;
        } else if constexpr (std::is_same_v<T, QuadraticSpec<S>>) {
          Vec<S> f(n);
          for (Index i = 0; i < n; ++i) {
            const S x = grid.coord(i);
            f[i] = s.coeff * x * x;
          }
          return f;
        } else {
          if (s.values.size() != n)
            throw std::invalid_argument("initial condition: sample count does not match grid");
          return s.values;
        }
      },
      spec);
}

namespace detail {

// One-sided 5-point first derivative at the left end; the gate for "even at
// the origin" on radial grids where the reflection stencils assume f'(0) = 0.
template <class S>
void require_even_at_origin(const Vec<S>& f, const Grid<S>& g, const char* which) {
  const S d0 = (S(-25) * f[0] + S(48) * f[1] - S(36) * f[2] + S(16) * f[3] - S(3) * f[4]) /
               (S(12) * g.dx);
  const S scale = std::max(S(1), f.abs().maxCoeff());
  if (std::abs(d0) > S(1e-6) * scale / g.dx)
    throw std::invalid_argument(std::string("initial condition: radial ") + which +
                                " must have zero slope at r = 0");
}

}  // namespace detail

template <class S>
FieldState<S> evaluate_ic(const InitialCondition<S>& ic, const Grid<S>& grid) {
  FieldState<S> s;
  s.t = S(0);
  s.u = sample_spec(ic.u0, grid);
  s.v = sample_spec(ic.ut0, grid);
  if (grid.kind == GridKind::Radial3D) {
    detail::require_even_at_origin(s.u, grid, "u0");
    detail::require_even_at_origin(s.v, grid, "ut0");
  }
  return s;
}

}  // namespace blowup
