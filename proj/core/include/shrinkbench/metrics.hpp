#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shrinkbench/dataset.hpp"

namespace shrinkbench {

// Tunables shared by the similarity measures. Callers normalize inputs
// themselves (per `normalization`) before calling the distance functions.
struct MetricParams {
  double epsilon_match = 0.25;  // LCSS/EDR match threshold, in z-score units
  double gap_ref = 0.0;         // ERP reference point g
  double time_scale = 1.0;      // weight of the time axis in 2-D embeddings
  NormalizationMode normalization = NormalizationMode::Zscore;
  std::optional<int> dtw_band;  // Sakoe-Chiba half-width; absent = unconstrained

  void validate() const;
};

struct Point2 {
  double t = 0.0;
  double v = 0.0;
};

using PointSequence = std::vector<Point2>;

// Embeds a series as 2-D points (time_scale * i/(n-1), value_i); a length-1
// series maps to t = 0.
PointSequence embed_points(std::span<const double> values, double time_scale);

// The distance measures. Shared contract: inputs non-empty and finite,
// results finite and >= 0, d(x,x) = 0, d(x,y) = d(y,x).

// sqrt(sum (a_i - b_i)^2); the only measure requiring equal lengths.
double euclidean(std::span<const double> a, std::span<const double> b);

// Dynamic time warping with L1 step cost, optional Sakoe-Chiba band;
// unnormalized path cost.
double dtw(std::span<const double> a, std::span<const double> b, const MetricParams& p);

// 1 - LCS(a,b)/min(n,m) where values match when |a_i - b_j| <= epsilon_match.
double lcss_distance(std::span<const double> a, std::span<const double> b, const MetricParams& p);

// Edit distance on real sequences: unit insert/delete, substitution free when
// |a_i - b_j| <= epsilon_match, normalized by max(n,m).
double edr(std::span<const double> a, std::span<const double> b, const MetricParams& p);

// Edit distance with real penalty against reference point g; a metric.
double erp(std::span<const double> a, std::span<const double> b, const MetricParams& p);

// Max of the two directed Hausdorff distances between point embeddings.
double hausdorff(std::span<const double> a, std::span<const double> b, const MetricParams& p);

// Discrete Frechet distance between point embeddings (coupling DP).
double frechet_discrete(std::span<const double> a, std::span<const double> b,
                        const MetricParams& p);

// Symmetric segment-path distance: mean point-to-polyline distance, averaged
// over both directions.
double sspd(std::span<const double> a, std::span<const double> b, const MetricParams& p);

enum class MetricKind { Euclidean, Dtw, Lcss, Edr, Erp, Hausdorff, Frechet, Sspd };

std::string to_string(MetricKind kind);
double metric_distance(MetricKind kind, std::span<const double> a, std::span<const double> b,
                       const MetricParams& p);

}  // namespace shrinkbench
