#include "shrinkbench/calendar.hpp"

#include <array>
#include <cstdio>

#include "shrinkbench/errors.hpp"

namespace shrinkbench {

namespace {

bool is_leap(std::int32_t year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

std::int32_t days_in_month(std::int32_t year, std::int32_t month) {
  static constexpr std::array<std::int32_t, 13> kDays = {0, 31, 28, 31, 30, 31, 30,
                                                         31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[static_cast<std::size_t>(month)];
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, std::int32_t& out) {
  std::int32_t v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

bool CalendarDate::valid() const {
  if (month < 1 || month > 12) return false;
  if (day < 1 || day > days_in_month(year, month)) return false;
  return true;
}

std::string CalendarDate::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

CalendarDate CalendarDate::next_day() const {
  CalendarDate d = *this;
  if (d.day < days_in_month(d.year, d.month)) {
    ++d.day;
  } else if (d.month < 12) {
    ++d.month;
    d.day = 1;
  } else {
    ++d.year;
    d.month = 1;
    d.day = 1;
  }
  return d;
}

bool CalendarDate::try_parse(std::string_view iso, CalendarDate& out) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return false;
  CalendarDate d;
  if (!parse_fixed_uint(iso, 0, 4, d.year)) return false;
  if (!parse_fixed_uint(iso, 5, 2, d.month)) return false;
  if (!parse_fixed_uint(iso, 8, 2, d.day)) return false;
  if (!d.valid()) return false;
  out = d;
  return true;
}

CalendarDate CalendarDate::parse(std::string_view iso) {
  CalendarDate d;
  if (!try_parse(iso, d)) {
    throw DataError("invalid ISO-8601 date: '" + std::string(iso) + "'");
  }
  return d;
}

}  // namespace shrinkbench
