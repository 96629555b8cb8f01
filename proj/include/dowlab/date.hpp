#pragma once

#include <compare>
#include <cstdio>
#include <optional>
#include <string>

namespace dowlab {

/// Calendar date, normalized to ISO ordering. Comparable and hashable by value.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  bool ok() const {
    static constexpr int days_in_month[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (year < 1 || month < 1 || month > 12 || day < 1) return false;
    int dim = days_in_month[month - 1];
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) dim = 29;
    return day <= dim;
  }

  /// YYYY-MM-DD
  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
  }

  /// Parses "m/d/yyyy" (the raw dataset's format). Empty optional on failure.
  static std::optional<Date> parse_mdy(const std::string& text);

  /// Parses either "m/d/yyyy" or "yyyy-mm-dd" (factor files accept both).
  static std::optional<Date> parse(const std::string& text);
};

}  // namespace dowlab
