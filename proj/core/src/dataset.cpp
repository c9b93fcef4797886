#include "shrinkbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/stats.hpp"

namespace shrinkbench {

std::string to_string(NormalizationMode mode) {
  return mode == NormalizationMode::Zscore ? "zscore" : "none";
}

NormalizationMode normalization_from_string(std::string_view s) {
  if (s == "zscore") return NormalizationMode::Zscore;
  if (s == "none") return NormalizationMode::None;
  throw ValidationError("unknown normalization mode: '" + std::string(s) + "'");
}

TimeSeries::TimeSeries(std::string id, std::vector<CalendarDate> dates,
                       std::vector<double> values)
    : id_(std::move(id)), dates_(std::move(dates)), values_(std::move(values)) {
  if (id_.empty()) throw ValidationError("time series id must be non-empty");
  if (dates_.size() != values_.size()) {
    throw ValidationError("time series '" + id_ + "': dates and values differ in length");
  }
  if (values_.size() < 2) {
    throw ValidationError("time series '" + id_ + "': needs at least 2 observations");
  }
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw ValidationError("time series '" + id_ + "': dates not strictly increasing at " +
                            dates_[i].to_string());
    }
  }
  if (!all_finite(values_)) {
    throw ValidationError("time series '" + id_ + "': non-finite value");
  }
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_ids, std::vector<CalendarDate> dates,
                             std::vector<std::vector<double>> columns)
    : column_ids_(std::move(column_ids)), dates_(std::move(dates)), columns_(std::move(columns)) {
  if (column_ids_.empty()) throw ValidationError("feature matrix: no columns");
  if (columns_.size() != column_ids_.size()) {
    throw ValidationError("feature matrix: column ids and column data differ in count");
  }
  if (dates_.size() < 2) throw ValidationError("feature matrix: needs at least 2 rows");
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw ValidationError("feature matrix: dates not strictly increasing");
    }
  }
  std::vector<std::string> sorted_ids = column_ids_;
  std::sort(sorted_ids.begin(), sorted_ids.end());
  if (std::adjacent_find(sorted_ids.begin(), sorted_ids.end()) != sorted_ids.end()) {
    throw ValidationError("feature matrix: duplicate column id");
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != dates_.size()) {
      throw ValidationError("feature matrix: column '" + column_ids_[j] + "' has wrong length");
    }
    if (!all_finite(columns_[j])) {
      throw ValidationError("feature matrix: column '" + column_ids_[j] + "' has non-finite value");
    }
  }
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view id) const {
  for (std::size_t j = 0; j < column_ids_.size(); ++j) {
    if (column_ids_[j] == id) return j;
  }
  return std::nullopt;
}

FeatureMatrix FeatureMatrix::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > n_rows()) throw ValidationError("feature matrix: bad row slice");
  std::vector<CalendarDate> dates(dates_.begin() + static_cast<std::ptrdiff_t>(begin),
                                  dates_.begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<std::vector<double>> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    cols.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(begin),
                      c.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return FeatureMatrix(column_ids_, std::move(dates), std::move(cols));
}

FeatureMatrix FeatureMatrix::take_rows(const std::vector<std::size_t>& rows) const {
  std::vector<CalendarDate> dates;
  dates.reserve(rows.size());
  for (const std::size_t r : rows) {
    if (r >= n_rows()) throw ValidationError("feature matrix: row index out of range");
    dates.push_back(dates_[r]);
  }
  std::vector<std::vector<double>> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const std::size_t r : rows) out.push_back(c[r]);
    cols.push_back(std::move(out));
  }
  return FeatureMatrix(column_ids_, std::move(dates), std::move(cols));
}

AlignedDataset::AlignedDataset(FeatureMatrix features, std::string target_id,
                               std::vector<double> y, int horizon)
    : features_(std::move(features)),
      target_id_(std::move(target_id)),
      y_(std::move(y)),
      horizon_(horizon) {
  if (horizon_ < 0) throw ValidationError("aligned dataset: negative horizon");
  if (y_.size() != features_.n_rows()) {
    throw ValidationError("aligned dataset: target length does not match feature rows");
  }
  if (!all_finite(y_)) throw ValidationError("aligned dataset: non-finite target value");
  const auto idx = features_.column_index(target_id_);
  if (!idx) {
    throw ValidationError("aligned dataset: target '" + target_id_ + "' is not a feature column");
  }
  target_column_ = *idx;
}

namespace {

// Number of common dates between two sorted date vectors.
std::size_t overlap_size(const std::vector<CalendarDate>& a, const std::vector<CalendarDate>& b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

FeatureMatrix align(const std::vector<TimeSeries>& series) {
  if (series.empty()) throw ValidationError("align: no input series");

  std::vector<CalendarDate> common = series.front().dates();
  for (std::size_t s = 1; s < series.size() && !common.empty(); ++s) {
    std::vector<CalendarDate> next;
    next.reserve(common.size());
    std::set_intersection(common.begin(), common.end(), series[s].dates().begin(),
                          series[s].dates().end(), std::back_inserter(next));
    common = std::move(next);
  }

  if (common.size() < 2) {
    // Name the worst-overlapping pair to make the failure actionable.
    std::size_t best_i = 0, best_j = series.size() > 1 ? 1 : 0;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < series.size(); ++i) {
      for (std::size_t j = i + 1; j < series.size(); ++j) {
        const std::size_t n = overlap_size(series[i].dates(), series[j].dates());
        if (n < best) {
          best = n;
          best_i = i;
          best_j = j;
        }
      }
    }
    throw DataError("align: only " + std::to_string(common.size()) +
                    " common dates across all series; smallest pairwise overlap is between '" +
                    series[best_i].id() + "' and '" + series[best_j].id() + "' (" +
                    std::to_string(best) + " dates)");
  }

  std::vector<std::string> ids;
  ids.reserve(series.size());
  std::vector<std::vector<double>> cols;
  cols.reserve(series.size());
  for (const TimeSeries& ts : series) {
    ids.push_back(ts.id());
    std::vector<double> col;
    col.reserve(common.size());
    std::size_t k = 0;
    for (const CalendarDate& d : common) {
      while (ts.dates()[k] < d) ++k;
      col.push_back(ts.values()[k]);
    }
    cols.push_back(std::move(col));
  }
  return FeatureMatrix(std::move(ids), std::move(common), std::move(cols));
}

AlignedDataset build_horizon_target(const FeatureMatrix& m, const std::string& target_id,
                                    int horizon) {
  const auto idx = m.column_index(target_id);
  if (!idx) throw ValidationError("build_horizon_target: unknown target '" + target_id + "'");
  if (horizon < 0) throw ValidationError("build_horizon_target: negative horizon");
  const std::size_t n = m.n_rows();
  const std::size_t h = static_cast<std::size_t>(horizon);
  if (h >= n) {
    throw ValidationError("build_horizon_target: horizon " + std::to_string(horizon) +
                          " >= row count " + std::to_string(n));
  }
  const std::size_t kept = n - h;
  if (kept < 2) {
    throw ValidationError("build_horizon_target: horizon " + std::to_string(horizon) +
                          " leaves fewer than 2 rows");
  }
  const std::vector<double>& target = m.column(*idx);
  std::vector<double> y(target.begin() + static_cast<std::ptrdiff_t>(h), target.end());
  FeatureMatrix features = (h == 0) ? m : m.slice_rows(0, kept);
  return AlignedDataset(std::move(features), target_id, std::move(y), horizon);
}

std::vector<double> normalize(std::span<const double> values, NormalizationMode mode) {
  if (values.empty()) throw ValidationError("normalize: empty input");
  if (!all_finite(values)) throw ValidationError("normalize: non-finite input");
  std::vector<double> out(values.begin(), values.end());
  if (mode == NormalizationMode::None) return out;
  const double m = mean(values);
  const double sd = sample_std(values);
  if (sd <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& v : out) v = (v - m) / sd;
  return out;
}

}  // namespace shrinkbench
