#include "shrinkbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace shrinkbench {

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 700.0;   // legend uses the area to the right
constexpr double kTop = 48.0;
constexpr double kBottom = 490.0;
constexpr double kXMin = 15.0;
constexpr double kXMax = 105.0;

const char* kPalette[18] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
    "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd", "#e6550d"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick step of the form {1, 2, 2.5, 5} * 10^e giving roughly `target` ticks.
double nice_step(double range, int target) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / static_cast<double>(target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step;
  if (norm <= 1.0) {
    step = 1.0;
  } else if (norm <= 2.0) {
    step = 2.0;
  } else if (norm <= 2.5) {
    step = 2.5;
  } else if (norm <= 5.0) {
    step = 5.0;
  } else {
    step = 10.0;
  }
  return step * mag;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::vector<ChartSeries>& series,
                              const std::string& comment) {
  double y_min = 1e300, y_max = -1e300;
  for (const ChartSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    if (s.has_trend) {
      for (const double pct : {20.0, 100.0}) {
        const double y = s.trend_intercept + s.trend_slope * pct / 100.0;
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (y_min > y_max) {
    y_min = 0.0;
    y_max = 1.0;
  }
  if (y_max - y_min < 1e-9) {
    y_min -= 0.05;
    y_max += 0.05;
  }
  const double pad = (y_max - y_min) * 0.06;
  y_min -= pad;
  y_max += pad;

  const auto sx = [&](double pct) {
    return kLeft + (pct - kXMin) / (kXMax - kXMin) * (kRight - kLeft);
  };
  const auto sy = [&](double v) {
    return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\""
      << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " " << fmt(kHeight) << "\">\n";
  if (!comment.empty()) {
    svg << "<!-- " << comment << " -->\n";
  }
  svg << "<rect width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"26\" font-family=\"sans-serif\" "
         "font-size=\"16\" text-anchor=\"middle\">"
      << escape_xml(title) << "</text>\n";

  // axes
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(kRight)
      << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
      << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";

  for (int pct = 20; pct <= 100; pct += 10) {
    const double x = sx(pct);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(kBottom + 5) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(kBottom) << "\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kBottom + 20)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << pct
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kHeight - 12)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">retained "
         "observations (%)</text>\n";

  const double step = nice_step(y_max - y_min, 6);
  const double first_tick = std::ceil(y_min / step) * step;
  for (double v = first_tick; v <= y_max + 1e-12; v += step) {
    const double y = sy(v);
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kRight)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 9) << "\" y=\"" << fmt(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt_label(v)
        << "</text>\n";
  }
  svg << "<text x=\"18\" y=\"" << fmt((kTop + kBottom) / 2)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 "
      << fmt((kTop + kBottom) / 2) << ")\">mean R&#178;</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const ChartSeries& s = series[i];
    const char* color = kPalette[i % 18];
    if (!s.points.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t p = 0; p < s.points.size(); ++p) {
        if (p) svg << ' ';
        svg << fmt(sx(s.points[p].first)) << ',' << fmt(sy(s.points[p].second));
      }
      svg << "\"/>\n";
    }
    if (s.has_trend) {
      const double ya = s.trend_intercept + s.trend_slope * 0.20;
      const double yb = s.trend_intercept + s.trend_slope * 1.00;
      svg << "<line x1=\"" << fmt(sx(20.0)) << "\" y1=\"" << fmt(sy(ya)) << "\" x2=\""
          << fmt(sx(100.0)) << "\" y2=\"" << fmt(sy(yb)) << "\" stroke=\"" << color
          << "\" stroke-width=\"1\" stroke-dasharray=\"6,4\" opacity=\"0.7\"/>\n";
    }
    const double ly = kTop + 8.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << fmt(kRight + 14) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(kRight + 38) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(kRight + 44) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
        << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace shrinkbench
