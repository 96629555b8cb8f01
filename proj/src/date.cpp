#include "dowlab/date.hpp"

#include <cctype>

namespace dowlab {

namespace {

// Reads 1..4 digits starting at pos; returns -1 if none.
int read_int(const std::string& s, std::size_t& pos, int max_digits) {
  int value = 0;
  int digits = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])) &&
         digits < max_digits) {
    value = value * 10 + (s[pos] - '0');
    ++pos;
    ++digits;
  }
  return digits == 0 ? -1 : value;
}

}  // namespace

std::optional<Date> Date::parse_mdy(const std::string& text) {
  std::size_t pos = 0;
  int m = read_int(text, pos, 2);
  if (m < 0 || pos >= text.size() || text[pos] != '/') return std::nullopt;
  ++pos;
  int d = read_int(text, pos, 2);
  if (d < 0 || pos >= text.size() || text[pos] != '/') return std::nullopt;
  ++pos;
  int y = read_int(text, pos, 4);
  if (y < 0 || pos != text.size()) return std::nullopt;
  Date date{y, m, d};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::optional<Date> Date::parse(const std::string& text) {
  if (text.find('-') != std::string::npos) {
    std::size_t pos = 0;
    int y = read_int(text, pos, 4);
    if (y < 0 || pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    int m = read_int(text, pos, 2);
    if (m < 0 || pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    int d = read_int(text, pos, 2);
    if (d < 0 || pos != text.size()) return std::nullopt;
    Date date{y, m, d};
    if (!date.ok()) return std::nullopt;
    return date;
  }
  return parse_mdy(text);
}

}  // namespace dowlab
