#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowup/sweep.hpp"

// Dependency-free SVG emission for the two figure styles the toolkit
// produces: stacked u(x) profiles at increasing times, and (alpha, beta)
// phase-diagram heatmaps. Output is deterministic (fixed formatting, no
// locale, no randomness) so re-plotting identical inputs is byte-identical.

namespace blowup {

struct Curve {
  double t = 0;
  std::vector<double> x, y;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt4g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Rgb {
  int r, g, b;
};

inline std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

// Perceptually uniform dark-to-light map, anchored every 1/8.
inline Rgb viridis(double t) {
  static constexpr int anchor[9][3] = {{68, 1, 84},    {71, 45, 123},  {59, 82, 139},
                                       {44, 114, 142}, {33, 145, 140}, {40, 174, 128},
                                       {94, 201, 98},  {173, 220, 48}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 8;
  const int k = std::min(7, static_cast<int>(t));
  const double f = t - k;
  auto mix = [&](int c) {
    return static_cast<int>(std::lround(anchor[k][c] + f * (anchor[k + 1][c] - anchor[k][c])));
  };
  return {mix(0), mix(1), mix(2)};
}

// Evenly spaced ticks with a 1/2/5 step, covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target - 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
    out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return out;
}

inline void text(std::string& s, double x, double y, const std::string& body,
                 const std::string& anchor = "middle", int size = 12,
                 const std::string& fill = "#333333", const std::string& extra = "") {
  s += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" font-size=\"" + std::to_string(size) +
       "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\"" + extra +
       " font-family=\"sans-serif\">" + body + "</text>\n";
}

struct Frame {
  double x0, y0, w, h;     // plot rectangle in pixels
  double lo_x, hi_x, lo_y, hi_y;
  double px(double v) const { return x0 + (v - lo_x) / (hi_x - lo_x) * w; }
  double py(double v) const { return y0 + h - (v - lo_y) / (hi_y - lo_y) * h; }
};

inline void axes(std::string& s, const Frame& f, const std::string& xlabel,
                 const std::string& ylabel, const std::string& title) {
  s += "<rect x=\"" + fmt2(f.x0) + "\" y=\"" + fmt2(f.y0) + "\" width=\"" + fmt2(f.w) +
       "\" height=\"" + fmt2(f.h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (double v : ticks(f.lo_x, f.hi_x)) {
    const double x = f.px(v);
    s += "<line x1=\"" + fmt2(x) + "\" y1=\"" + fmt2(f.y0 + f.h) + "\" x2=\"" + fmt2(x) +
         "\" y2=\"" + fmt2(f.y0 + f.h + 5) + "\" stroke=\"#333333\"/>\n";
    text(s, x, f.y0 + f.h + 18, fmt4g(v));
  }
  for (double v : ticks(f.lo_y, f.hi_y)) {
    const double y = f.py(v);
    s += "<line x1=\"" + fmt2(f.x0 - 5) + "\" y1=\"" + fmt2(y) + "\" x2=\"" + fmt2(f.x0) +
         "\" y2=\"" + fmt2(y) + "\" stroke=\"#333333\"/>\n";
    text(s, f.x0 - 8, y + 4, fmt4g(v), "end");
  }
  text(s, f.x0 + f.w / 2, f.y0 + f.h + 38, xlabel, "middle", 13);
  text(s, 16, f.y0 + f.h / 2, ylabel, "middle", 13,
       "#333333", " transform=\"rotate(-90 16 " + fmt2(f.y0 + f.h / 2) + ")\"");
  text(s, f.x0 + f.w / 2, f.y0 - 12, title, "middle", 15);
}

}  // namespace detail

// Stacked solution profiles, one polyline per time, colored dark-to-light in
// time order.
inline std::string svg_profile_stack(const std::vector<Curve>& curves, const std::string& title,
                                     const std::string& xlabel = "x",
                                     const std::string& ylabel = "u") {
  if (curves.empty()) throw std::invalid_argument("profile plot: no curves");
  for (const auto& c : curves)
    if (c.x.size() != c.y.size() || c.x.size() < 2)
      throw std::invalid_argument("profile plot: curve needs matching x/y of size >= 2");

  double lo_x = curves[0].x.front(), hi_x = curves[0].x.back();
  double lo_y = curves[0].y[0], hi_y = lo_y;
  for (const auto& c : curves) {
    for (double v : c.x) lo_x = std::min(lo_x, v), hi_x = std::max(hi_x, v);
    for (double v : c.y) lo_y = std::min(lo_y, v), hi_y = std::max(hi_y, v);
  }
  if (hi_y == lo_y) hi_y = lo_y + 1;
  const double pad = 0.05 * (hi_y - lo_y);
  detail::Frame f{70, 40, 540, 385, lo_x, hi_x, lo_y - pad, hi_y + pad};

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"480\" "
                  "viewBox=\"0 0 760 480\">\n<rect width=\"760\" height=\"480\" fill=\"#ffffff\"/>\n";
  detail::axes(s, f, xlabel, ylabel, title);

  const std::size_t m = curves.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double shade = m == 1 ? 0.5 : double(i) / double(m - 1);
    std::string pts;
    for (std::size_t k = 0; k < curves[i].x.size(); ++k)
      pts += detail::fmt2(f.px(curves[i].x[k])) + "," + detail::fmt2(f.py(curves[i].y[k])) + " ";
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
         detail::hex(detail::viridis(shade)) + "\" stroke-width=\"1.5\"/>\n";
  }

  // legend: at most 8 entries, always including the first and last time
  std::vector<std::size_t> idx;
  const std::size_t nleg = std::min<std::size_t>(m, 8);
  for (std::size_t k = 0; k < nleg; ++k)
    idx.push_back(nleg == 1 ? 0 : k * (m - 1) / (nleg - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  double ly = 60;
  for (std::size_t i : idx) {
    const double shade = m == 1 ? 0.5 : double(i) / double(m - 1);
    s += "<line x1=\"628\" y1=\"" + detail::fmt2(ly) + "\" x2=\"652\" y2=\"" + detail::fmt2(ly) +
         "\" stroke=\"" + detail::hex(detail::viridis(shade)) + "\" stroke-width=\"2\"/>\n";
    detail::text(s, 658, ly + 4, "t = " + detail::fmt4g(curves[i].t), "start");
    ly += 20;
  }
  s += "</svg>\n";
  return s;
}

enum class BetaAxis { Raw, Sqrt };

// Phase-diagram heatmap: alpha on the vertical axis, beta (optionally on a
// square-root scale) on the horizontal one. Blowup cells are colored by event
// time; escaped-pulse cells stay white; the classified shape letter is
// overlaid where available.
inline std::string svg_heatmap(const PhaseDiagram& pd, BetaAxis beta_axis = BetaAxis::Raw,
                               const std::string& title = "phase diagram") {
  if (pd.cells.size() != pd.alphas.size() * pd.betas.size())
    throw std::invalid_argument("heatmap: cell/axis mismatch");

  const bool log_a = pd.spec.alpha_axis.scale == AxisSpec::Scale::Log;
  const bool log_b = pd.spec.beta_axis.scale == AxisSpec::Scale::Log;
  auto tx_b = [&](double b) { return log_b ? std::log(b) : beta_axis == BetaAxis::Sqrt ? std::sqrt(b) : b; };
  auto tx_a = [&](double a) { return log_a ? std::log(a) : a; };

  // cell boundaries: midpoints between transformed neighbours, extended by a
  // half-spacing at the ends (degenerate single-value axes get a unit band)
  auto bounds = [](std::vector<double> v) {
    std::vector<double> e(v.size() + 1);
    if (v.size() == 1) {
      const double h = v[0] != 0 ? std::abs(v[0]) * 0.5 : 0.5;
      e = {v[0] - h, v[0] + h};
      return e;
    }
    for (std::size_t i = 1; i < v.size(); ++i) e[i] = (v[i - 1] + v[i]) / 2;
    e.front() = v.front() - (e[1] - v.front());
    e.back() = v.back() + (v.back() - e[v.size() - 1]);
    return e;
  };
  std::vector<double> ta(pd.alphas.size()), tb(pd.betas.size());
  std::transform(pd.alphas.begin(), pd.alphas.end(), ta.begin(), tx_a);
  std::transform(pd.betas.begin(), pd.betas.end(), tb.begin(), tx_b);
  const auto ea = bounds(ta), eb = bounds(tb);

  double t_lo = 0, t_hi = 1;
  bool have_blowup = false;
  for (const auto& c : pd.cells)
    if (c.outcome == OutcomeKind::Blowup) {
      if (!have_blowup) t_lo = t_hi = c.t_event;
      t_lo = std::min(t_lo, c.t_event);
      t_hi = std::max(t_hi, c.t_event);
      have_blowup = true;
    }

  detail::Frame f{70, 40, 520, 385, eb.front(), eb.back(), ea.front(), ea.back()};
  const std::string xlabel =
      log_b ? "beta (log)" : beta_axis == BetaAxis::Sqrt ? "sqrt(beta)" : "beta";
  const std::string ylabel = log_a ? "alpha (log)" : "alpha";

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"480\" "
                  "viewBox=\"0 0 760 480\">\n<rect width=\"760\" height=\"480\" fill=\"#ffffff\"/>\n";

  for (std::size_t ia = 0; ia < pd.alphas.size(); ++ia) {
    for (std::size_t ib = 0; ib < pd.betas.size(); ++ib) {
      const CellRecord& c = pd.cells[ia * pd.betas.size() + ib];
      const double x = f.px(eb[ib]), xr = f.px(eb[ib + 1]);
      const double yt = f.py(ea[ia + 1]), yb = f.py(ea[ia]);
      detail::Rgb rgb{255, 255, 255};
      bool blank = false;
      switch (c.outcome) {
        case OutcomeKind::Blowup:
          rgb = detail::viridis(t_hi > t_lo ? (c.t_event - t_lo) / (t_hi - t_lo) : 0.5);
          break;
        case OutcomeKind::BoundaryHit:
          blank = true;  // pulse escaped: designated blank region
          break;
        case OutcomeKind::MaxTimeReached:
          rgb = {217, 217, 217};
          break;
        case OutcomeKind::NumericalBreakdown:
          rgb = {85, 85, 85};
          break;
      }
      s += "<rect x=\"" + detail::fmt2(x) + "\" y=\"" + detail::fmt2(yt) + "\" width=\"" +
           detail::fmt2(xr - x) + "\" height=\"" + detail::fmt2(yb - yt) + "\" fill=\"" +
           (blank ? std::string("#ffffff") : detail::hex(rgb)) +
           "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
      if (c.blowup_kind && *c.blowup_kind != BlowupKind::Unresolved) {
        const int size = std::clamp(static_cast<int>(std::min(xr - x, yb - yt) * 0.45), 8, 16);
        const double lum = 0.299 * rgb.r + 0.587 * rgb.g + 0.114 * rgb.b;
        detail::text(s, (x + xr) / 2, (yt + yb) / 2 + size * 0.35,
                     *c.blowup_kind == BlowupKind::VType ? "V" : "M", "middle", size,
                     lum > 140 ? "#000000" : "#ffffff");
      }
    }
  }
  detail::axes(s, f, xlabel, ylabel, title);

  // colorbar for blowup time, plus swatches for the categorical outcomes
  if (have_blowup) {
    const double cb_x = 640, cb_y = 60, cb_w = 16, cb_h = 220;
    const int bands = 64;
    for (int k = 0; k < bands; ++k) {
      const double frac = (k + 0.5) / bands;
      s += "<rect x=\"" + detail::fmt2(cb_x) + "\" y=\"" +
           detail::fmt2(cb_y + cb_h * (1 - double(k + 1) / bands)) + "\" width=\"" +
           detail::fmt2(cb_w) + "\" height=\"" + detail::fmt2(cb_h / bands + 0.5) + "\" fill=\"" +
           detail::hex(detail::viridis(frac)) + "\"/>\n";
    }
    s += "<rect x=\"" + detail::fmt2(cb_x) + "\" y=\"" + detail::fmt2(cb_y) + "\" width=\"" +
         detail::fmt2(cb_w) + "\" height=\"" + detail::fmt2(cb_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
    detail::text(s, cb_x + cb_w + 6, cb_y + 10, detail::fmt4g(t_hi), "start");
    detail::text(s, cb_x + cb_w + 6, cb_y + cb_h, detail::fmt4g(t_lo), "start");
    detail::text(s, cb_x + cb_w / 2, cb_y - 12, "t_event", "middle");
  }
  double sy = 320;
  auto swatch = [&](const std::string& color, const std::string& label) {
    s += "<rect x=\"640\" y=\"" + detail::fmt2(sy) + "\" width=\"14\" height=\"14\" fill=\"" +
         color + "\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
    detail::text(s, 660, sy + 11, label, "start", 11);
    sy += 20;
  };
  swatch("#ffffff", "escaped");
  swatch("#d9d9d9", "no event");
  swatch("#555555", "breakdown");
  s += "</svg>\n";
  return s;
}

}  // namespace blowup
