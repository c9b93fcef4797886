#pragma once

#include <string>
#include <utility>
#include <vector>

namespace shrinkbench {

// One plotted method: R^2 points over retained percentage plus its
// least-squares trend line (slope/intercept in retained-fraction units).
struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (retained %, r2)
  double trend_slope = 0.0;
  double trend_intercept = 0.0;
  bool has_trend = false;
};

// Self-contained SVG line chart (fixed 20..100% x-axis, auto-ranged y-axis,
// legend, dashed trend lines). `comment` is embedded verbatim as an XML
// comment so outputs carry their config snapshot.
std::string render_line_chart(const std::string& title, const std::vector<ChartSeries>& series,
                              const std::string& comment);

}  // namespace shrinkbench
