#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shrinkbench/calendar.hpp"

namespace shrinkbench {

enum class NormalizationMode { None, Zscore };

std::string to_string(NormalizationMode mode);
NormalizationMode normalization_from_string(std::string_view s);

// One named, date-indexed real-valued sequence (e.g. "AAPL.Close").
// Immutable after construction; the constructor enforces strictly increasing
// dates, equal lengths >= 2 and finite values.
class TimeSeries {
 public:
  TimeSeries(std::string id, std::vector<CalendarDate> dates, std::vector<double> values);

  const std::string& id() const { return id_; }
  const std::vector<CalendarDate>& dates() const { return dates_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::string id_;
  std::vector<CalendarDate> dates_;
  std::vector<double> values_;
};

// N x M feature matrix with one date per row. Columns are stored contiguously
// (column-major) because nearly every consumer works per column.
class FeatureMatrix {
 public:
  FeatureMatrix(std::vector<std::string> column_ids, std::vector<CalendarDate> dates,
                std::vector<std::vector<double>> columns);

  std::size_t n_rows() const { return dates_.size(); }
  std::size_t n_cols() const { return column_ids_.size(); }
  const std::vector<std::string>& column_ids() const { return column_ids_; }
  const std::vector<CalendarDate>& dates() const { return dates_; }
  const std::vector<double>& column(std::size_t j) const { return columns_[j]; }
  double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::optional<std::size_t> column_index(std::string_view id) const;

  // Rows [begin, end) as a new matrix.
  FeatureMatrix slice_rows(std::size_t begin, std::size_t end) const;
  // An arbitrary (sorted) subset of rows as a new matrix.
  FeatureMatrix take_rows(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<std::string> column_ids_;
  std::vector<CalendarDate> dates_;
  std::vector<std::vector<double>> columns_;
};

// Feature matrix plus the horizon-shifted target vector, row-aligned by date:
// y[t] is the raw target series value `horizon` rows after row t.
class AlignedDataset {
 public:
  AlignedDataset(FeatureMatrix features, std::string target_id, std::vector<double> y, int horizon);

  const FeatureMatrix& features() const { return features_; }
  const std::string& target_id() const { return target_id_; }
  const std::vector<double>& y() const { return y_; }
  int horizon() const { return horizon_; }
  std::size_t n_rows() const { return y_.size(); }
  std::size_t target_column() const { return target_column_; }

 private:
  FeatureMatrix features_;
  std::string target_id_;
  std::vector<double> y_;
  int horizon_;
  std::size_t target_column_;
};

// Joins the input series on the dates present in every one of them
// (set intersection, ascending); column order follows input order.
// Throws DataError naming the pair of series with the smallest overlap when
// fewer than two common dates remain.
FeatureMatrix align(const std::vector<TimeSeries>& series);

// y[t] = m[target_id][t + horizon]; the last `horizon` rows are dropped from
// the features. The target column itself stays available as a feature.
AlignedDataset build_horizon_target(const FeatureMatrix& m, const std::string& target_id,
                                    int horizon);

// Zscore: (x - mean) / sample std, all zeros for a constant input; None is
// the identity.
std::vector<double> normalize(std::span<const double> values, NormalizationMode mode);

}  // namespace shrinkbench
