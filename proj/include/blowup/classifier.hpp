#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "blowup/stencils.hpp"

namespace blowup {

enum class BlowupKind { VType, MType, Unresolved };
enum class Confidence { Clear, NearLimit };

template <class S = double>
struct ClassifierConfig {
  S peak_floor_frac = S(0.5);   // local maxima below this fraction of the global max are noise
  S separation_cells = S(8);    // minimum peak separation (in dx) for a two-wall reading
  S distance_cells = S(4);      // peaks inside this radius (in dx) count as central
  S symmetry_cells = S(2);      // |x_left + x_right| tolerance (in dx) for mirror pairs
  S min_peak = S(1e6);          // reject states that have not actually blown up
};

template <class S = double>
struct BlowupClassification {
  BlowupKind kind = BlowupKind::Unresolved;
  S distance = S(0);         // |x| of the strongest |u_xx| peak
  S peak_separation = S(0);  // gap between the two dominant well-separated peaks
  Confidence confidence = Confidence::Clear;
};

namespace detail {

template <class S>
struct Peak {
  S x;
  S value;
};

// Local maxima of |u_xx| above a fraction of the global max, with sub-grid
// quadratic refinement of position and height.
template <class S>
std::vector<Peak<S>> find_peaks(const Vec<S>& w, const Grid<S>& g, S floor_frac) {
  const Index n = g.n_points;
  const S gmax = w.maxCoeff();
  const S floor = floor_frac * gmax;
  const bool wrap = g.kind == GridKind::Periodic1D;
  std::vector<Peak<S>> peaks;
  for (Index i = 0; i < n; ++i) {
    if (!wrap && (i == 0 || i == n - 1)) continue;
    const S wm = w[(i - 1 + n) % n], w0 = w[i], wp = w[(i + 1) % n];
    if (!(w0 > wm && w0 >= wp) || w0 < floor) continue;
    const S denom = wm - S(2) * w0 + wp;
    S delta = S(0), height = w0;
    if (denom < S(0)) {
      delta = (wm - wp) / (S(2) * denom);
      height = w0 - (wm - wp) * delta / S(4);
    }
    peaks.push_back({g.coord(i) + delta * g.dx, height});
  }
  return peaks;
}

}  // namespace detail

// |x| of the strongest |u_xx| peak, sub-grid refined. Grid-level ties resolve
// toward the origin so mirror-symmetric states report one distance.
template <class S>
S divergence_distance(const FieldState<S>& s, const Grid<S>& g) {
  const Vec<S> w = d2(s.u, g).abs();
  const Index n = g.n_points;
  Index best = 0;
  for (Index i = 1; i < n; ++i)
    if (w[i] > w[best] ||
        (w[i] == w[best] && std::abs(g.coord(i)) < std::abs(g.coord(best))))
      best = i;
  const bool wrap = g.kind == GridKind::Periodic1D;
  if (!wrap && (best == 0 || best == n - 1)) return std::abs(g.coord(best));
  const S wm = w[(best - 1 + n) % n], w0 = w[best], wp = w[(best + 1) % n];
  const S denom = wm - S(2) * w0 + wp;
  S delta = S(0);
  if (denom < S(0)) delta = (wm - wp) / (S(2) * denom);
  return std::abs(g.coord(best) + delta * g.dx);
}

// Split a terminal blowup profile into the single-spike (V) and symmetric
// double-wall (M) shapes; anything else is Unresolved. NearLimit flags
// borderline geometry: merged walls or separation within a factor two of the
// resolution floor.
template <class S>
BlowupClassification<S> classify_terminal(const FieldState<S>& s, const Grid<S>& g,
                                          const ClassifierConfig<S>& cfg = {}) {
  const Vec<S> w = d2(s.u, g).abs();
  if (!(w.maxCoeff() >= cfg.min_peak))
    throw std::invalid_argument("classifier: state has no divergent |u_xx| peak");

  const S sep_floor = cfg.separation_cells * g.dx;
  const S dist_floor = cfg.distance_cells * g.dx;
  const S sym_tol = cfg.symmetry_cells * g.dx;

  auto peaks = detail::find_peaks(w, g, cfg.peak_floor_frac);
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value > b.value;
    return std::abs(a.x) < std::abs(b.x);
  });

  BlowupClassification<S> out;
  out.distance = std::abs(peaks.front().x);

  // strongest partner at a workable separation from the dominant peak
  const auto& p1 = peaks.front();
  const detail::Peak<S>* p2 = nullptr;
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    if (std::abs(peaks[i].x - p1.x) >= sep_floor) {
      p2 = &peaks[i];
      break;
    }
  }
  out.peak_separation = p2 ? std::abs(p2->x - p1.x) : S(0);

  const bool all_central = std::all_of(peaks.begin(), peaks.end(), [&](const auto& p) {
    return std::abs(p.x) < dist_floor;
  });

  if (all_central) {
    out.kind = BlowupKind::VType;
    out.confidence = peaks.size() > 1 ? Confidence::NearLimit : Confidence::Clear;
  } else if (p2 && std::abs(p1.x + p2->x) <= sym_tol) {
    out.kind = BlowupKind::MType;
    out.confidence =
        out.peak_separation < S(2) * sep_floor ? Confidence::NearLimit : Confidence::Clear;
  } else {
    out.kind = BlowupKind::Unresolved;
    out.confidence = Confidence::NearLimit;
  }
  return out;
}

}  // namespace blowup
