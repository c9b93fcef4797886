#include "shrinkbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/stats.hpp"

namespace shrinkbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_input(std::span<const double> a, std::span<const double> b, const char* name) {
  if (a.empty() || b.empty()) {
    throw ValidationError(std::string(name) + ": empty input series");
  }
  if (!all_finite(a) || !all_finite(b)) {
    throw ValidationError(std::string(name) + ": non-finite input value");
  }
}

double point_dist(const Point2& p, const Point2& q) {
  const double dt = p.t - q.t;
  const double dv = p.v - q.v;
  return std::sqrt(dt * dt + dv * dv);
}

// Euclidean distance from p to the segment [s0, s1]. Endpoint projections use
// the endpoints themselves, so a vertex is at distance exactly 0 from its own
// segments.
double point_segment_dist(const Point2& p, const Point2& s0, const Point2& s1) {
  const double dx = s1.t - s0.t;
  const double dy = s1.v - s0.v;
  const double len2 = dx * dx + dy * dy;
  if (len2 <= 0.0) return point_dist(p, s0);
  const double u = ((p.t - s0.t) * dx + (p.v - s0.v) * dy) / len2;
  if (u <= 0.0) return point_dist(p, s0);
  if (u >= 1.0) return point_dist(p, s1);
  const Point2 proj{s0.t + u * dx, s0.v + u * dy};
  return point_dist(p, proj);
}

double directed_hausdorff(const PointSequence& from, const PointSequence& to) {
  double worst = 0.0;
  for (const Point2& p : from) {
    double best = kInf;
    for (const Point2& q : to) {
      best = std::min(best, point_dist(p, q));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

// Mean over points of `from` of the distance to the polyline of `to`.
double segment_path_dist(const PointSequence& from, const PointSequence& to) {
  double total = 0.0;
  for (const Point2& p : from) {
    double best = kInf;
    if (to.size() == 1) {
      best = point_dist(p, to.front());
    } else {
      for (std::size_t s = 0; s + 1 < to.size(); ++s) {
        best = std::min(best, point_segment_dist(p, to[s], to[s + 1]));
      }
    }
    total += best;
  }
  return total / static_cast<double>(from.size());
}

}  // namespace

void MetricParams::validate() const {
  if (!(epsilon_match > 0.0)) throw ValidationError("metric params: epsilon_match must be > 0");
  if (!(time_scale > 0.0)) throw ValidationError("metric params: time_scale must be > 0");
  if (dtw_band && *dtw_band < 0) throw ValidationError("metric params: dtw_band must be >= 0");
}

PointSequence embed_points(std::span<const double> values, double time_scale) {
  if (values.empty()) throw ValidationError("embed_points: empty input");
  PointSequence pts(values.size());
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    pts[i].t = n == 1 ? 0.0
                      : time_scale * static_cast<double>(i) / static_cast<double>(n - 1);
    pts[i].v = values[i];
  }
  return pts;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  check_input(a, b, "euclidean");
  if (a.size() != b.size()) {
    throw ValidationError("euclidean: length mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

double dtw(std::span<const double> a, std::span<const double> b, const MetricParams& p) {
  check_input(a, b, "dtw");
  p.validate();
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (p.dtw_band) {
    const auto band = static_cast<std::ptrdiff_t>(*p.dtw_band);
    const auto diff = std::abs(static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(m));
    if (diff > band) {
      throw ValidationError("dtw: band " + std::to_string(*p.dtw_band) +
                            " admits no warping path for lengths " + std::to_string(n) + " and " +
                            std::to_string(m));
    }
  }
  std::vector<double> prev(m + 1, kInf);
  std::vector<double> cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t j = 1; j <= m; ++j) {
      if (p.dtw_band) {
        const auto diff = std::abs(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j));
        if (diff > static_cast<std::ptrdiff_t>(*p.dtw_band)) continue;
      }
      const double step = std::min({prev[j], cur[j - 1], prev[j - 1]});
      if (step == kInf) continue;
      cur[j] = std::abs(a[i - 1] - b[j - 1]) + step;
    }
    std::swap(prev, cur);
  }
  const double d = prev[m];
  if (!std::isfinite(d)) {
    throw ValidationError("dtw: band admits no warping path");
  }
  return d;
}

double lcss_distance(std::span<const double> a, std::span<const double> b,
                     const MetricParams& p) {
  check_input(a, b, "lcss");
  p.validate();
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1, 0);
  std::vector<std::size_t> cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (std::abs(a[i - 1] - b[j - 1]) <= p.epsilon_match) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[m]);
  return 1.0 - lcs / static_cast<double>(std::min(n, m));
}

double edr(std::span<const double> a, std::span<const double> b, const MetricParams& p) {
  check_input(a, b, "edr");
  p.validate();
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> prev(m + 1);
  std::vector<double> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub = std::abs(a[i - 1] - b[j - 1]) <= p.epsilon_match ? 0.0 : 1.0;
      cur[j] = std::min({prev[j] + 1.0, cur[j - 1] + 1.0, prev[j - 1] + sub});
    }
    std::swap(prev, cur);
  }
  return prev[m] / static_cast<double>(std::max(n, m));
}

double erp(std::span<const double> a, std::span<const double> b, const MetricParams& p) {
  check_input(a, b, "erp");
  p.validate();
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const double g = p.gap_ref;
  std::vector<double> prev(m + 1);
  std::vector<double> cur(m + 1);
  prev[0] = 0.0;
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + std::abs(b[j - 1] - g);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0] + std::abs(a[i - 1] - g);
    for (std::size_t j = 1; j <= m; ++j) {
      const double match = prev[j - 1] + std::abs(a[i - 1] - b[j - 1]);
      const double gap_a = prev[j] + std::abs(a[i - 1] - g);
      const double gap_b = cur[j - 1] + std::abs(b[j - 1] - g);
      cur[j] = std::min({match, gap_a, gap_b});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double hausdorff(std::span<const double> a, std::span<const double> b, const MetricParams& p) {
  check_input(a, b, "hausdorff");
  p.validate();
  const PointSequence pa = embed_points(a, p.time_scale);
  const PointSequence pb = embed_points(b, p.time_scale);
  return std::max(directed_hausdorff(pa, pb), directed_hausdorff(pb, pa));
}

double frechet_discrete(std::span<const double> a, std::span<const double> b,
                        const MetricParams& p) {
  check_input(a, b, "frechet");
  p.validate();
  const PointSequence pa = embed_points(a, p.time_scale);
  const PointSequence pb = embed_points(b, p.time_scale);
  const std::size_t n = pa.size();
  const std::size_t m = pb.size();
  std::vector<double> prev(m, kInf);
  std::vector<double> cur(m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = point_dist(pa[i], pb[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = d;
      } else if (i == 0) {
        reach = std::max(cur[j - 1], d);
      } else if (j == 0) {
        reach = std::max(prev[j], d);
      } else {
        reach = std::max(std::min({prev[j], cur[j - 1], prev[j - 1]}), d);
      }
      cur[j] = reach;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double sspd(std::span<const double> a, std::span<const double> b, const MetricParams& p) {
  check_input(a, b, "sspd");
  p.validate();
  const PointSequence pa = embed_points(a, p.time_scale);
  const PointSequence pb = embed_points(b, p.time_scale);
  return 0.5 * (segment_path_dist(pa, pb) + segment_path_dist(pb, pa));
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Dtw: return "dtw";
    case MetricKind::Lcss: return "lcss";
    case MetricKind::Edr: return "edr";
    case MetricKind::Erp: return "erp";
    case MetricKind::Hausdorff: return "hausdorff";
    case MetricKind::Frechet: return "frechet";
    case MetricKind::Sspd: return "sspd";
  }
  return "unknown";
}

double metric_distance(MetricKind kind, std::span<const double> a, std::span<const double> b,
                       const MetricParams& p) {
  switch (kind) {
    case MetricKind::Euclidean: return euclidean(a, b);
    case MetricKind::Dtw: return dtw(a, b, p);
    case MetricKind::Lcss: return lcss_distance(a, b, p);
    case MetricKind::Edr: return edr(a, b, p);
    case MetricKind::Erp: return erp(a, b, p);
    case MetricKind::Hausdorff: return hausdorff(a, b, p);
    case MetricKind::Frechet: return frechet_discrete(a, b, p);
    case MetricKind::Sspd: return sspd(a, b, p);
  }
  throw ValidationError("unknown metric kind");
}

}  // namespace shrinkbench
