#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace shrinkbench {

// A calendar date (no time-of-day), formatted as ISO-8601 YYYY-MM-DD.
struct CalendarDate {
  std::int32_t year = 1970;
  std::int32_t month = 1;  // 1..12
  std::int32_t day = 1;    // 1..31, checked against the month length

  auto operator<=>(const CalendarDate&) const = default;

  bool valid() const;
  std::string to_string() const;
  CalendarDate next_day() const;

  // Strict YYYY-MM-DD parse; throws DataError on anything else.
  static CalendarDate parse(std::string_view iso);
  static bool try_parse(std::string_view iso, CalendarDate& out);
};

}  // namespace shrinkbench
