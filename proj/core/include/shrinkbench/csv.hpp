#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shrinkbench/dataset.hpp"

namespace shrinkbench {

// Result of loading one per-ticker OHLCV file: five series named
// "<TICKER>.<Field>" (ticker = file stem) plus a count of rows dropped for
// unparseable or missing fields.
struct TickerLoad {
  std::string ticker;
  std::vector<TimeSeries> series;
  std::size_t dropped_rows = 0;
};

// Parses a Yahoo-style export: header Date,Open,High,Low,Close[,Adj Close],
// Volume with ISO dates. Adj Close is ignored. A row with any bad field is
// dropped (and counted); duplicate dates, a missing header or zero usable
// rows are hard errors.
TickerLoad load_ticker_csv(const std::filesystem::path& path);

struct DirectoryLoad {
  std::vector<TimeSeries> series;
  std::size_t files = 0;
  std::size_t dropped_rows = 0;
};

// Loads every *.csv in the directory (sorted by filename) and optionally
// restricts all series to [date_start, date_end].
DirectoryLoad load_directory(const std::filesystem::path& dir,
                             const std::optional<CalendarDate>& date_start,
                             const std::optional<CalendarDate>& date_end);

}  // namespace shrinkbench
