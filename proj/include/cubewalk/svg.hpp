#pragma once

// Self-contained SVG line plots. No external renderer; the output text is a
// pure function of the inputs, so identical data yields byte-identical
// files.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubewalk/csv.hpp"

namespace cubewalk {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string svg_num(double v) { return format_double(v, 6); }

inline const char* plot_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % 8];
}

}  // namespace detail

/// Render a line plot. `description` lands in a <desc> element (used for
/// provenance and choice-of-functional notes).
inline std::string render_line_plot(const std::string& title,
                                    const std::string& x_label,
                                    const std::string& y_label,
                                    const std::vector<PlotSeries>& series,
                                    const std::string& description = "",
                                    bool log_x = false) {
  if (series.empty())
    throw std::invalid_argument("render_line_plot: no series");
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      const double xv = log_x ? std::log10(x) : x;
      x_min = std::min(x_min, xv);
      x_max = std::max(x_max, xv);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (!(x_min <= x_max) || !(y_min <= y_max))
    throw std::invalid_argument("render_line_plot: no finite data");
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double pad_y = 0.05 * (y_max - y_min);
  y_min -= pad_y;
  y_max += pad_y;

  const double width = 800, height = 500;
  const double ml = 70, mr = 160, mt = 40, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) {
    const double xv = log_x ? std::log10(x) : x;
    return ml + (xv - x_min) / (x_max - x_min) * pw;
  };
  auto sy = [&](double y) { return mt + (y_max - y) / (y_max - y_min) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"500\" viewBox=\"0 0 800 500\">\n";
  if (!description.empty()) svg += "<desc>" + description + "</desc>\n";
  svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";

  // axes
  svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" +
         detail::svg_num(mt + ph) + "\" x2=\"" + detail::svg_num(ml + pw) +
         "\" y2=\"" + detail::svg_num(mt + ph) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" +
         detail::svg_num(mt) + "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" +
         detail::svg_num(mt + ph) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int n_ticks = 5;
  for (int t = 0; t <= n_ticks; ++t) {
    const double fx = x_min + (x_max - x_min) * t / n_ticks;
    const double label = log_x ? std::pow(10.0, fx) : fx;
    const double px = ml + pw * t / n_ticks;
    svg += "<line x1=\"" + detail::svg_num(px) + "\" y1=\"" +
           detail::svg_num(mt + ph) + "\" x2=\"" + detail::svg_num(px) +
           "\" y2=\"" + detail::svg_num(mt + ph + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::svg_num(px) + "\" y=\"" +
           detail::svg_num(mt + ph + 20) +
           "\" text-anchor=\"middle\" font-size=\"11\" "
           "font-family=\"sans-serif\">" + detail::svg_num(label) +
           "</text>\n";
    const double fy = y_min + (y_max - y_min) * t / n_ticks;
    const double py = sy(fy);
    svg += "<line x1=\"" + detail::svg_num(ml - 5) + "\" y1=\"" +
           detail::svg_num(py) + "\" x2=\"" + detail::svg_num(ml) +
           "\" y2=\"" + detail::svg_num(py) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" +
           detail::svg_num(py + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" "
           "font-family=\"sans-serif\">" + detail::svg_num(fy) + "</text>\n";
  }
  svg += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
         detail::svg_num(height - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::svg_num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 18 " +
         detail::svg_num(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].points.empty()) continue;
    std::string pts;
    for (const auto& [x, y] : series[s].points) {
      pts += detail::svg_num(sx(x)) + "," + detail::svg_num(sy(y)) + " ";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           detail::plot_color(s) + "\" stroke-width=\"1.5\"/>\n";
    const double ly = mt + 14 + 16 * static_cast<double>(s);
    svg += "<line x1=\"" + detail::svg_num(width - mr + 10) + "\" y1=\"" +
           detail::svg_num(ly - 4) + "\" x2=\"" +
           detail::svg_num(width - mr + 30) + "\" y2=\"" +
           detail::svg_num(ly - 4) + "\" stroke=\"" + detail::plot_color(s) +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::svg_num(width - mr + 35) + "\" y=\"" +
           detail::svg_num(ly) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" +
           series[s].label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

}  // namespace cubewalk
