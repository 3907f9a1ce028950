#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "turret_guidance/nonlinear_sim.hpp"

namespace turret_guidance::svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Segment {
  double x0, y0, x1, y1;
  std::string color;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Segment> segments;
  bool equal_aspect = false;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick step giving roughly `target` intervals.
inline double nice_step(double span, int target = 6) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  void pad() {
    if (!std::isfinite(x0)) *this = {0.0, 1.0, 0.0, 1.0};
    if (x1 - x0 <= 0.0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 <= 0.0) { y0 -= 0.5; y1 += 0.5; }
    const double px = 0.04 * (x1 - x0), py = 0.06 * (y1 - y0);
    x0 -= px; x1 += px; y0 -= py; y1 += py;
  }
};

}  // namespace detail

/// Draws one panel into the rectangle (left, top, w, h).
inline void draw_panel(std::ostringstream& out, const Panel& p, double left, double top, double w,
                       double h) {
  using detail::num;
  const double ml = 70, mr = 150, mt = 30, mb = 45;
  const double pw = w - ml - mr, ph = h - mt - mb;
  detail::Box b;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) b.add(s.x[i], s.y[i]);
  for (const auto& sg : p.segments) {
    b.add(sg.x0, sg.y0);
    b.add(sg.x1, sg.y1);
  }
  b.pad();
  if (p.equal_aspect) {
    const double sx = (b.x1 - b.x0) / pw, sy = (b.y1 - b.y0) / ph;
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
    b.x0 = cx - 0.5 * s * pw; b.x1 = cx + 0.5 * s * pw;
    b.y0 = cy - 0.5 * s * ph; b.y1 = cy + 0.5 * s * ph;
  }
  const auto X = [&](double x) { return left + ml + (x - b.x0) / (b.x1 - b.x0) * pw; };
  const auto Y = [&](double y) { return top + mt + (b.y1 - y) / (b.y1 - b.y0) * ph; };

  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"" << num(left + ml) << "\" y=\"" << num(top + mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const double xs = detail::nice_step(b.x1 - b.x0), ys = detail::nice_step(b.y1 - b.y0);
  for (double v = std::ceil(b.x0 / xs) * xs; v <= b.x1; v += xs) {
    out << "<line x1=\"" << num(X(v)) << "\" y1=\"" << num(top + mt) << "\" x2=\"" << num(X(v))
        << "\" y2=\"" << num(top + mt + ph) << "\" stroke=\"#e4e4e4\"/>\n";
    out << "<text x=\"" << num(X(v)) << "\" y=\"" << num(top + mt + ph + 15)
        << "\" text-anchor=\"middle\">" << detail::tick_label(v) << "</text>\n";
  }
  for (double v = std::ceil(b.y0 / ys) * ys; v <= b.y1; v += ys) {
    out << "<line x1=\"" << num(left + ml) << "\" y1=\"" << num(Y(v)) << "\" x2=\""
        << num(left + ml + pw) << "\" y2=\"" << num(Y(v)) << "\" stroke=\"#e4e4e4\"/>\n";
    out << "<text x=\"" << num(left + ml - 5) << "\" y=\"" << num(Y(v) + 4)
        << "\" text-anchor=\"end\">" << detail::tick_label(v) << "</text>\n";
  }
  out << "<text x=\"" << num(left + ml + pw / 2) << "\" y=\"" << num(top + 18)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << detail::escape(p.title) << "</text>\n";
  out << "<text x=\"" << num(left + ml + pw / 2) << "\" y=\"" << num(top + h - 8)
      << "\" text-anchor=\"middle\">" << detail::escape(p.x_label) << "</text>\n";
  out << "<text transform=\"translate(" << num(left + 16) << "," << num(top + mt + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape(p.y_label) << "</text>\n";

  for (const auto& sg : p.segments) {
    out << "<line x1=\"" << num(X(sg.x0)) << "\" y1=\"" << num(Y(sg.y0)) << "\" x2=\""
        << num(X(sg.x1)) << "\" y2=\"" << num(Y(sg.y1)) << "\" stroke=\"" << sg.color
        << "\" stroke-width=\"0.8\" opacity=\"0.7\"/>\n";
  }
  int legend = 0;
  for (const auto& s : p.series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << num(X(s.x[i])) << ',' << num(Y(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    if (s.label.empty()) continue;
    const double ly = top + mt + 12 + 16 * legend++;
    const double lx = left + ml + pw + 10;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << num(lx + 25) << "\" y=\"" << num(ly + 4) << "\">"
        << detail::escape(s.label) << "</text>\n";
  }
  out << "</g>\n";
}

/// Stacks panels vertically into one document.
inline std::string render(const std::vector<Panel>& panels, double width = 900,
                          double panel_height = 320) {
  std::ostringstream out;
  const double height = panel_height * static_cast<double>(panels.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(out, panels[i], 0.0, panel_height * static_cast<double>(i), width, panel_height);
  }
  out << "</svg>\n";
  return out.str();
}

inline constexpr const char* kPursuerColor = "#1f5fbf";
inline constexpr const char* kTargetColor = "#c0392b";
inline constexpr const char* kLosColor = "#9aa0a6";
inline constexpr const char* kTurretColor = "#27ae60";

/// Paths of both vehicles, with LOS rays (grey) and turret boresight rays of
/// length R (green) every `ray_every` samples.
inline std::string trajectory_plot(const TrajectoryLog& log, double r_max, std::size_t ray_every = 25) {
  Panel p;
  p.title = "Engagement geometry";
  p.x_label = "x [m]";
  p.y_label = "y [m]";
  p.equal_aspect = true;
  Series pursuer{"pursuer", kPursuerColor, {}, {}};
  Series target{"target", kTargetColor, {}, {}};
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    const auto& s = log.samples[i].state;
    pursuer.x.push_back(s.pursuer.x);
    pursuer.y.push_back(s.pursuer.y);
    target.x.push_back(s.target.x);
    target.y.push_back(s.target.y);
    if (i % ray_every == 0 || i + 1 == log.samples.size()) {
      p.segments.push_back({s.pursuer.x, s.pursuer.y, s.target.x, s.target.y, kLosColor});
      p.segments.push_back({s.pursuer.x, s.pursuer.y, s.pursuer.x + r_max * std::cos(s.psi),
                            s.pursuer.y + r_max * std::sin(s.psi), kTurretColor});
    }
  }
  p.series = {pursuer, target, Series{"LOS", kLosColor, {}, {}}, Series{"turret (R)", kTurretColor, {}, {}}};
  return render({p}, 900, 700);
}

/// Pursuer acceleration and turret angular acceleration histories.
inline std::string command_plot(const TrajectoryLog& log) {
  Panel a{"Pursuer lateral acceleration", "t [s]", "a_P [m/s^2]", {}, {}, false};
  Panel t{"Turret angular acceleration", "t [s]", "tau [rad/s^2]", {}, {}, false};
  Series sa{"a_P", kPursuerColor, {}, {}};
  Series st{"tau", kTurretColor, {}, {}};
  for (const auto& s : log.samples) {
    sa.x.push_back(s.state.t);
    sa.y.push_back(s.a_p);
    st.x.push_back(s.state.t);
    st.y.push_back(s.tau);
  }
  a.series = {sa};
  t.series = {st};
  return render({a, t});
}

/// r/R and wrap(gamma - psi)/delta, with the unit capture bounds.
inline std::string normalized_error_plot(const TrajectoryLog& log, double r_max, double fov) {
  Panel p{"Normalized range and pointing error", "t [s]", "normalized value", {}, {}, false};
  Series range{"r / R", kPursuerColor, {}, {}};
  Series point{"(gamma - psi) / delta", kTurretColor, {}, {}};
  for (const auto& s : log.samples) {
    range.x.push_back(s.state.t);
    range.y.push_back(s.r / r_max);
    point.x.push_back(s.state.t);
    point.y.push_back(wrap_angle(s.gamma - s.state.psi) / fov);
  }
  const double t0 = log.samples.empty() ? 0.0 : log.samples.front().state.t;
  const double t1 = log.samples.empty() ? 1.0 : log.samples.back().state.t;
  Series upper{"bounds", "#555", {t0, t1}, {1.0, 1.0}, true};
  Series lower{"", "#555", {t0, t1}, {-1.0, -1.0}, true};
  p.series = {range, point, upper, lower};
  // The range curve starts at r0/R >> 1; clip the view to the interesting band.
  for (auto& s : p.series)
    for (auto& y : s.y) y = std::clamp(y, -3.0, 3.0);
  return render({p});
}

}  // namespace turret_guidance::svg
