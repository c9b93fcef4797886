#include "shrinkbench/csv.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "shrinkbench/errors.hpp"

namespace shrinkbench {

namespace {

const std::array<std::string, 5> kFields = {"Open", "High", "Low", "Close", "Volume"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size() || !std::isfinite(v)) return false;
  out = v;
  return true;
}

}  // namespace

TickerLoad load_ticker_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "': empty file");
  const std::vector<std::string> header_raw = split_csv_line(line);
  std::map<std::string, std::size_t> header;
  for (std::size_t i = 0; i < header_raw.size(); ++i) header[trim(header_raw[i])] = i;

  if (!header.count("Date")) {
    throw DataError("'" + path.string() + "': missing required header column 'Date'");
  }
  for (const std::string& f : kFields) {
    if (!header.count(f)) {
      throw DataError("'" + path.string() + "': missing required header column '" + f + "'");
    }
  }
  const std::size_t date_col = header.at("Date");

  struct Row {
    CalendarDate date;
    std::array<double, 5> values;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    Row row;
    bool ok = fields.size() > date_col && CalendarDate::try_parse(trim(fields[date_col]), row.date);
    for (std::size_t f = 0; ok && f < kFields.size(); ++f) {
      const std::size_t col = header.at(kFields[f]);
      ok = col < fields.size() && parse_number(fields[col], row.values[f]);
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    rows.push_back(row);
  }
  if (rows.size() < 2) {
    throw DataError("'" + path.string() + "': fewer than 2 usable rows (" +
                    std::to_string(dropped) + " dropped)");
  }

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw DataError("'" + path.string() + "': duplicate date " + rows[i].date.to_string());
    }
  }

  TickerLoad load;
  load.ticker = path.stem().string();
  load.dropped_rows = dropped;
  std::vector<CalendarDate> dates;
  dates.reserve(rows.size());
  for (const Row& r : rows) dates.push_back(r.date);
  for (std::size_t f = 0; f < kFields.size(); ++f) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const Row& r : rows) values.push_back(r.values[f]);
    load.series.emplace_back(load.ticker + "." + kFields[f], dates, std::move(values));
  }
  return load;
}

DirectoryLoad load_directory(const std::filesystem::path& dir,
                             const std::optional<CalendarDate>& date_start,
                             const std::optional<CalendarDate>& date_end) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no .csv files in '" + dir.string() + "'");

  DirectoryLoad out;
  out.files = files.size();
  for (const auto& file : files) {
    TickerLoad load = load_ticker_csv(file);
    out.dropped_rows += load.dropped_rows;
    for (TimeSeries& ts : load.series) {
      if (!date_start && !date_end) {
        out.series.push_back(std::move(ts));
        continue;
      }
      std::vector<CalendarDate> dates;
      std::vector<double> values;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (date_start && ts.dates()[i] < *date_start) continue;
        if (date_end && *date_end < ts.dates()[i]) continue;
        dates.push_back(ts.dates()[i]);
        values.push_back(ts.values()[i]);
      }
      if (dates.size() < 2) {
        throw DataError("series '" + ts.id() + "' has fewer than 2 rows in the date window");
      }
      out.series.emplace_back(ts.id(), std::move(dates), std::move(values));
    }
  }
  return out;
}

}  // namespace shrinkbench
