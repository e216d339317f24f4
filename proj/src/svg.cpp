#include "specbreak/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace specbreak {

namespace {

constexpr double kPanelWidth = 420.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMargin = 36.0;

std::string fmt(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", x);
  return buffer;
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, double x0, double y0,
                     double ymax, const char* style) {
  std::string points;
  const double w = kPanelWidth - 2 * kMargin;
  const double h = kPanelHeight - 2 * kMargin;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = x0 + kMargin + xs[i] * w;
    const double py = y0 + kPanelHeight - kMargin - (ymax > 0 ? ys[i] / ymax : 0.0) * h;
    points += fmt(px) + ',' + fmt(py) + ' ';
  }
  return "<polyline fill=\"none\" " + std::string(style) + " points=\"" + points + "\"/>\n";
}

}  // namespace

std::string render_svg(const BreakReport& report) {
  Index d = 0;
  for (const auto& c : report.curves) d = std::max(d, std::max(c.a, c.b) + 1);
  const double width = kPanelWidth * static_cast<double>(std::max<Index>(d, 1));
  const double height = kPanelHeight * static_cast<double>(std::max<Index>(d, 1));
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
                    fmt(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& c : report.curves) {
    const double x0 = kPanelWidth * static_cast<double>(c.b);
    const double y0 = kPanelHeight * static_cast<double>(c.a);
    double ymax = 0.0;
    for (double v : c.value) ymax = std::max(ymax, v);
    for (double v : c.threshold) ymax = std::max(ymax, v);
    ymax *= 1.05;
    const double left = x0 + kMargin;
    const double right = x0 + kPanelWidth - kMargin;
    const double top = y0 + kMargin;
    const double bottom = y0 + kPanelHeight - kMargin;
    out += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(right - left) + "\" height=\"" +
           fmt(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(left) + "\" y=\"" + fmt(top - 8) + "\">component (" + std::to_string(c.a + 1) + "," +
           std::to_string(c.b + 1) + ")</text>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double px = left + tick * (right - left);
      out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(bottom + 14) + "\" text-anchor=\"middle\">" + fmt(tick) +
             "</text>\n";
    }
    out += "<text x=\"" + fmt(left - 4) + "\" y=\"" + fmt(top + 4) + "\" text-anchor=\"end\">" + fmt(ymax) +
           "</text>\n";
    for (const auto& b : report.breaks) {
      const double px = left + b.location * (right - left);
      out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(px) + "\" y2=\"" + fmt(bottom) +
             "\" stroke=\"firebrick\"/>\n";
    }
    out += polyline(c.v, c.value, x0, y0, ymax, "stroke=\"black\"");
    out += polyline(c.v, c.threshold, x0, y0, ymax, "stroke=\"steelblue\" stroke-dasharray=\"5,4\"");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace specbreak
