#pragma once

// Minimal static SVG plots: root loci, critical-weight sweeps and trajectories.
// Output is plain text with fixed number formatting, so identical inputs give
// identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "pngopt/io.hpp"
#include "pngopt/linear_analysis.hpp"
#include "pngopt/trajectory_opt.hpp"

namespace pngopt::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  bool scatter = false;
  std::string label;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
};

namespace detail {

inline std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline void range(const Panel& p, double& x0, double& x1, double& y0, double& y1) {
  x0 = y0 = std::numeric_limits<double>::infinity();
  x1 = y1 = -std::numeric_limits<double>::infinity();
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = p.log_y ? std::log10(s.y[i]) : s.y[i];
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  const auto pad = [](double& lo, double& hi) {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    const double span = hi - lo;
    const double m = span > 0 ? 0.05 * span : std::max(1e-12, 0.05 * std::abs(lo) + 0.5);
    lo -= m;
    hi += m;
  };
  pad(x0, x1);
  pad(y0, y1);
}

inline void draw_panel(std::ostringstream& os, const Panel& p, double ox, double oy, double w,
                       double h) {
  double x0, x1, y0, y1;
  range(p, x0, x1, y0, y1);
  const auto px = [&](double x) { return ox + (x - x0) / (x1 - x0) * w; };
  const auto py = [&](double y) { return oy + h - ((p.log_y ? std::log10(y) : y) - y0) / (y1 - y0) * h; };

  os << "<rect x=\"" << f(ox) << "\" y=\"" << f(oy) << "\" width=\"" << f(w) << "\" height=\"" << f(h)
     << "\" fill=\"none\" stroke=\"#000\"/>\n";
  os << "<text x=\"" << f(ox + w / 2) << "\" y=\"" << f(oy - 8)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << p.title << "</text>\n";
  os << "<text x=\"" << f(ox + w / 2) << "\" y=\"" << f(oy + h + 34)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << p.x_label << "</text>\n";
  os << "<text x=\"" << f(ox - 58) << "\" y=\"" << f(oy + h / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
     << f(ox - 58) << ' ' << f(oy + h / 2) << ")\">" << p.y_label << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    const double ylab = p.log_y ? std::pow(10.0, yv) : yv;
    os << "<text x=\"" << f(px(xv)) << "\" y=\"" << f(oy + h + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv) << "</text>\n";
    os << "<text x=\"" << f(ox - 4) << "\" y=\"" << f(oy + h - (yv - y0) / (y1 - y0) * h + 3)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick(ylab) << "</text>\n";
  }
  if (x0 < 0 && x1 > 0) {
    os << "<line x1=\"" << f(px(0)) << "\" y1=\"" << f(oy) << "\" x2=\"" << f(px(0)) << "\" y2=\""
       << f(oy + h) << "\" stroke=\"#bbb\"/>\n";
  }
  if (!p.log_y && y0 < 0 && y1 > 0) {
    os << "<line x1=\"" << f(ox) << "\" y1=\"" << f(py(0)) << "\" x2=\"" << f(ox + w) << "\" y2=\""
       << f(py(0)) << "\" stroke=\"#bbb\"/>\n";
  }
  double legend_y = oy + 14;
  for (const auto& s : p.series) {
    if (s.scatter) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << f(px(s.x[i])) << "\" cy=\"" << f(py(s.y[i]))
           << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (p.log_y && !(s.y[i] > 0))) continue;
        os << (first ? "" : " ") << f(px(s.x[i])) << ',' << f(py(s.y[i]));
        first = false;
      }
      os << "\"/>\n";
    }
    if (!s.label.empty()) {
      os << "<text x=\"" << f(ox + w - 6) << "\" y=\"" << f(legend_y)
         << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
         << "</text>\n";
      legend_y += 14;
    }
  }
}

} // namespace detail

/// Stacks panels vertically into one document.
[[nodiscard]] inline std::string render(const std::vector<Panel>& panels) {
  const double width = 720, pw = 600, ph = 220, left = 90, top = 40, gap = 80;
  const double height = top + panels.size() * (ph + gap);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::f(width) << "\" height=\""
     << detail::f(height) << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    detail::draw_panel(os, panels[i], left, top + i * (ph + gap), pw, ph);
  }
  os << "</svg>\n";
  return os.str();
}

[[nodiscard]] inline std::vector<Panel> locus_panels(const std::vector<LocusPoint>& locus, double v) {
  Series osc{{}, {}, "#1f77b4", true, "Oscillatory"};
  Series uns{{}, {}, "#d62728", true, "Unstable"};
  Series deg{{}, {}, "#7f7f7f", true, "Degenerate"};
  for (const auto& pt : locus) {
    Series& s = pt.mode == ModeClass::Oscillatory ? osc : pt.mode == ModeClass::Unstable ? uns : deg;
    for (const auto& e : pt.eigenvalues) {
      s.x.push_back(e.real());
      s.y.push_back(e.imag());
    }
  }
  Panel p{"Root locus over R at v = " + detail::tick(v) + " m/s", "Re(s) [1/s]", "Im(s) [rad/s]", {}};
  for (auto* s : {&osc, &uns, &deg}) {
    if (!s->x.empty()) p.series.push_back(std::move(*s));
  }
  return {p};
}

[[nodiscard]] inline std::vector<Panel> sweep_panels(const std::vector<SweepEntry>& sweep) {
  Series r{{}, {}, "#1f77b4", false, ""};
  Series t{{}, {}, "#2ca02c", false, ""};
  for (const auto& e : sweep) {
    if (!e.result) continue;
    r.x.push_back(e.v);
    r.y.push_back(e.result->r_crit);
    t.x.push_back(e.v);
    t.y.push_back(e.result->period_at_crit);
  }
  return {Panel{"Critical jerk weight", "nominal speed [m/s]", "R_crit", {r}, true},
          Panel{"Pulse-and-glide period at R_crit", "nominal speed [m/s]", "period [s]", {t}}};
}

[[nodiscard]] inline std::vector<Panel> trajectory_panels(const EvaluationResult& e) {
  Series x1{e.trajectory.t, {}, "#1f77b4", false, ""};
  Series x2{e.trajectory.t, {}, "#ff7f0e", false, ""};
  Series u{e.trajectory.t, e.u, "#2ca02c", false, ""};
  for (const auto& row : e.trajectory.rows) {
    x1.y.push_back(row[0]);
    x2.y.push_back(row[1]);
  }
  return {Panel{"Velocity", "t [s]", "x1 [m/s]", {x1}},
          Panel{"Propulsive force", "t [s]", "x2 [N]", {x2}},
          Panel{"Force rate input", "t [s]", "u [N/s]", {u}}};
}

enum class PlotKind { Locus, Sweep, Trajectory };

/// Writes a plot; refuses empty data without touching the file system.
template <typename Data>
void emit_svg(PlotKind kind, const Data& data, const std::string& path, double v = 0.0) {
  std::vector<Panel> panels;
  if constexpr (std::is_same_v<Data, std::vector<LocusPoint>>) {
    if (kind != PlotKind::Locus) throw std::invalid_argument("emit_svg: kind/data mismatch");
    if (data.empty()) throw std::invalid_argument("emit_svg: no data to plot");
    panels = locus_panels(data, v);
  } else if constexpr (std::is_same_v<Data, std::vector<SweepEntry>>) {
    if (kind != PlotKind::Sweep) throw std::invalid_argument("emit_svg: kind/data mismatch");
    if (std::none_of(data.begin(), data.end(), [](const SweepEntry& e) { return e.result.has_value(); })) {
      throw std::invalid_argument("emit_svg: no data to plot");
    }
    panels = sweep_panels(data);
  } else {
    static_assert(std::is_same_v<Data, EvaluationResult>, "unsupported plot data");
    if (kind != PlotKind::Trajectory) throw std::invalid_argument("emit_svg: kind/data mismatch");
    if (data.trajectory.size() == 0) throw std::invalid_argument("emit_svg: no data to plot");
    panels = trajectory_panels(data);
  }
  write_text(path, render(panels));
}

} // namespace pngopt::svg
