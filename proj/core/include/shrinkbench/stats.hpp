#pragma once

#include <cmath>
#include <span>

namespace shrinkbench {

// Small numeric helpers shared across modules. Variance and standard
// deviation use the sample (n-1) denominator everywhere in this library.

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (const double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (const double v : x) {
    const double d = v - m;
    ss += d * d;
  }
  return ss / static_cast<double>(n - 1);
}

inline double sample_std(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

// Pearson correlation; returns 0 when either side has zero variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return 0.0;
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline bool all_finite(std::span<const double> x) {
  for (const double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace shrinkbench
