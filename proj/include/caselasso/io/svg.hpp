#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "caselasso/error.hpp"
#include "caselasso/types.hpp"
#include "caselasso/weight_path.hpp"

// Static, self-contained SVG line charts (inline styles, no scripts).
namespace caselasso::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  bool dashed = false;
  double width = 1.5;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  double width = 720.0;
  double height = 440.0;
  bool reverse_x = false;  // x decreasing to the right
};

namespace detail {

inline std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                                 "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};
  return colors[i % 10];
}

}  // namespace detail

/// One <polyline> per series over a shared frame with axis ticks.
inline std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InputError("series '" + s.label + "' has mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
  const double plot_w = opt.width - left - right;
  const double plot_h = opt.height - top - bottom;
  auto sx = [&](double x) {
    const double t = (x - x0) / (x1 - x0);
    return left + (opt.reverse_x ? 1.0 - t : t) * plot_w;
  };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * plot_h; };
  using detail::svg_number;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_number(opt.width) << "\" height=\""
    << svg_number(opt.height) << "\" viewBox=\"0 0 " << svg_number(opt.width) << ' ' << svg_number(opt.height)
    << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" style=\"fill:#ffffff\"/>\n";
  o << "<rect x=\"" << svg_number(left) << "\" y=\"" << svg_number(top) << "\" width=\"" << svg_number(plot_w)
    << "\" height=\"" << svg_number(plot_h) << "\" style=\"fill:none;stroke:#333333;stroke-width:1\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    o << "<text x=\"" << svg_number(sx(xv)) << "\" y=\"" << svg_number(top + plot_h + 18)
      << "\" style=\"font:11px sans-serif;text-anchor:middle\">" << detail::tick_label(xv) << "</text>\n";
    o << "<text x=\"" << svg_number(left - 6) << "\" y=\"" << svg_number(sy(yv) + 4)
      << "\" style=\"font:11px sans-serif;text-anchor:end\">" << detail::tick_label(yv) << "</text>\n";
  }
  o << "<text x=\"" << svg_number(opt.width / 2) << "\" y=\"22\" style=\"font:14px sans-serif;text-anchor:middle\">"
    << detail::escape(opt.title) << "</text>\n";
  o << "<text x=\"" << svg_number(left + plot_w / 2) << "\" y=\"" << svg_number(opt.height - 10)
    << "\" style=\"font:12px sans-serif;text-anchor:middle\">" << detail::escape(opt.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << svg_number(top + plot_h / 2) << "\" transform=\"rotate(-90 16 "
    << svg_number(top + plot_h / 2) << ")\" style=\"font:12px sans-serif;text-anchor:middle\">"
    << detail::escape(opt.y_label) << "</text>\n";
  for (const auto& s : series) {
    o << "<polyline data-label=\"" << detail::escape(s.label) << "\" style=\"fill:none;stroke:" << s.color
      << ";stroke-width:" << svg_number(s.width) << (s.dashed ? ";stroke-dasharray:4 3" : "") << "\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << (first ? "" : " ") << svg_number(sx(s.x[i])) << ',' << svg_number(sy(s.y[i]));
      first = false;
    }
    o << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

/// Coefficients against omega, from 1 (left) to 0 (right). Each segment is
/// sampled because coefficients are affine in xi, not in omega.
inline std::string coefficient_path_svg(const WeightPath& path, const std::vector<std::string>& names,
                                        int samples_per_segment = 24) {
  if (path.segments.empty()) throw InputError("empty path");
  const Index p = path.segments.front().beta_at_hi.size();
  std::vector<double> omegas;
  for (const auto& s : path.segments)
    for (int i = 0; i < samples_per_segment; ++i)
      omegas.push_back(s.omega_hi - (s.omega_hi - s.omega_lo) * i / samples_per_segment);
  omegas.push_back(0.0);

  std::vector<Series> series(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    auto& s = series[static_cast<std::size_t>(j)];
    s.label = j < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(j)] : "x" + std::to_string(j + 1);
    s.color = detail::palette(static_cast<std::size_t>(j));
  }
  for (double w : omegas) {
    const auto c = interpolate(path, w);
    for (Index j = 0; j < p; ++j) {
      series[static_cast<std::size_t>(j)].x.push_back(w);
      series[static_cast<std::size_t>(j)].y.push_back(c.beta(j));
    }
  }
  ChartOptions opt;
  opt.title = "Case-weight coefficient path, case " + std::to_string(path.case_index + 1);
  opt.x_label = "case weight omega";
  opt.y_label = "coefficient";
  opt.reverse_x = true;
  return line_chart(series, opt);
}

/// Cook's distance of every case against the l1 fraction, with the
/// threshold curve dashed in red.
inline std::string influence_graph_svg(const InfluenceGraph& g) {
  std::vector<Series> series;
  for (Index k = 0; k < g.distances.cols(); ++k) {
    Series s;
    s.label = "case " + std::to_string(k + 1);
    s.color = "#7f7f7f";
    s.width = 1.0;
    s.x = g.fractions;
    for (Index i = 0; i < g.distances.rows(); ++i) s.y.push_back(g.distances(i, k));
    series.push_back(std::move(s));
  }
  Series t;
  t.label = "threshold";
  t.color = "#d62728";
  t.dashed = true;
  t.width = 2.0;
  t.x = g.fractions;
  t.y = g.thresholds;
  series.push_back(std::move(t));
  ChartOptions opt;
  opt.title = "Case influence graph";
  opt.x_label = "fraction |beta|_1 / max |beta|_1";
  opt.y_label = "Cook's distance";
  return line_chart(series, opt);
}

}  // namespace caselasso::io
