#include "dowlab/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "dowlab/csv.hpp"
#include "dowlab/errors.hpp"
#include "dowlab/text.hpp"

namespace dowlab::ingest {

namespace {

constexpr const char* kAttributeNames[] = {
    "quarter",
    "stock",
    "date",
    "open",
    "high",
    "low",
    "close",
    "volume",
    "percent_change_price",
    "percent_change_volume_over_last_wk",
    "previous_weeks_volume",
    "next_weeks_open",
    "next_weeks_close",
    "percent_change_next_weeks_price",
    "days_to_next_dividend",
    "percent_return_next_dividend",
};

std::optional<double> parse_plain_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end != begin + text.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_integer(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.c_str();
  char* end = nullptr;
  long long value = std::strtoll(begin, &end, 10);
  if (end != begin + text.size()) return std::nullopt;
  return value;
}

// Validates and removes thousands separators: groups of three digits after
// the first comma, nothing else.
std::optional<std::string> strip_thousands(const std::string& digits) {
  if (digits.find(',') == std::string::npos) return digits;
  std::string out;
  std::size_t first = digits.find(',');
  std::size_t int_end = digits.find('.');
  if (int_end == std::string::npos) int_end = digits.size();
  if (first == 0 || first > 3 || first > int_end) return std::nullopt;
  out = digits.substr(0, first);
  std::size_t pos = first;
  while (pos < int_end) {
    if (digits[pos] != ',') return std::nullopt;
    if (pos + 3 > int_end) return std::nullopt;
    for (std::size_t i = pos + 1; i <= pos + 3; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(digits[i]))) return std::nullopt;
      out += digits[i];
    }
    pos += 4;
  }
  out += digits.substr(int_end);
  if (out.find(',') != std::string::npos) return std::nullopt;
  return out;
}

struct FieldReader {
  const std::vector<std::string>& fields;
  const std::vector<std::size_t>& column_of;  // attribute index -> field index
  std::size_t row;                            // 1-based data row

  const std::string& raw(std::size_t attr) const { return fields[column_of[attr]]; }

  double number(std::size_t attr) const {
    auto v = parse_plain_number(trim(raw(attr)));
    if (!v) throw MalformedRow(row, kAttributeNames[attr], "expected a number, got '" + raw(attr) + "'");
    return *v;
  }

  double dollars(std::size_t attr) const {
    auto v = parse_dollar(trim(raw(attr)));
    if (!v) throw MalformedRow(row, kAttributeNames[attr], "expected a dollar amount, got '" + raw(attr) + "'");
    return *v;
  }

  std::int64_t integer(std::size_t attr) const {
    auto v = parse_integer(trim(raw(attr)));
    if (!v) throw MalformedRow(row, kAttributeNames[attr], "expected an integer, got '" + raw(attr) + "'");
    return *v;
  }
};

enum Attr : std::size_t {
  kQuarter = 0,
  kStock,
  kDate,
  kOpen,
  kHigh,
  kLow,
  kClose,
  kVolume,
  kPctChangePrice,
  kPctChangeVolume,
  kPrevVolume,
  kNextOpen,
  kNextClose,
  kPctChangeNext,
  kDaysToDividend,
  kPctReturnDividend,
};

}  // namespace

const std::vector<std::string>& attribute_names() {
  static const std::vector<std::string> names(std::begin(kAttributeNames),
                                              std::end(kAttributeNames));
  return names;
}

std::optional<double> parse_dollar(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string body = text;
  bool negative = false;
  if (body[0] == '-') {
    negative = true;
    body = body.substr(1);
  }
  if (!body.empty() && body[0] == '$') body = body.substr(1);
  if (body.empty()) return std::nullopt;
  auto plain = strip_thousands(body);
  if (!plain) return std::nullopt;
  for (char c : *plain) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.') return std::nullopt;
  }
  auto value = parse_plain_number(*plain);
  if (!value) return std::nullopt;
  return negative ? -*value : *value;
}

Dataset parse_dataset(const std::string& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw IoError(path, "file is empty, no header row");

  const auto& header = rows.front();
  std::vector<std::size_t> column_of(std::size(kAttributeNames));
  for (std::size_t a = 0; a < std::size(kAttributeNames); ++a) {
    auto it = std::find(header.begin(), header.end(), kAttributeNames[a]);
    if (it == header.end()) throw MissingColumn(kAttributeNames[a]);
    column_of[a] = static_cast<std::size_t>(it - header.begin());
  }

  Dataset d;
  d.attribute_count = header.size();
  d.records.reserve(rows.size() - 1);

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& fields = rows[i];
    if (fields.size() != header.size()) {
      d.schema_anomalies.push_back({i, fields.size()});
      continue;
    }
    FieldReader f{fields, column_of, i};
    WeeklyRecord r;

    std::int64_t quarter = f.integer(kQuarter);
    if (quarter != 1 && quarter != 2)
      throw MalformedRow(i, "quarter", "must be 1 or 2, got " + std::to_string(quarter));
    r.quarter = static_cast<int>(quarter);

    r.stock = trim(f.raw(kStock));
    if (r.stock.empty()) throw MalformedRow(i, "stock", "empty ticker");

    auto date = Date::parse_mdy(trim(f.raw(kDate)));
    if (!date) throw MalformedRow(i, "date", "expected m/d/yyyy, got '" + f.raw(kDate) + "'");
    r.date = *date;

    r.open = f.dollars(kOpen);
    r.high = f.dollars(kHigh);
    r.low = f.dollars(kLow);
    r.close = f.dollars(kClose);
    if (r.open <= 0) throw MalformedRow(i, "open", "price must be positive");
    if (r.close <= 0) throw MalformedRow(i, "close", "price must be positive");
    if (r.low > r.high) throw MalformedRow(i, "low", "low exceeds high");

    r.volume = f.integer(kVolume);
    if (r.volume < 0) throw MalformedRow(i, "volume", "share count must be non-negative");

    r.percent_change_price = f.number(kPctChangePrice);

    if (std::string v = trim(f.raw(kPctChangeVolume)); !v.empty())
      r.percent_change_volume_over_last_wk = f.number(kPctChangeVolume);
    if (std::string v = trim(f.raw(kPrevVolume)); !v.empty())
      r.previous_weeks_volume = f.integer(kPrevVolume);

    r.next_weeks_open = f.dollars(kNextOpen);
    r.next_weeks_close = f.dollars(kNextClose);
    r.percent_change_next_weeks_price = f.number(kPctChangeNext);
    r.days_to_next_dividend = static_cast<int>(f.integer(kDaysToDividend));
    r.percent_return_next_dividend = f.number(kPctReturnDividend);

    d.records.push_back(std::move(r));
  }

  std::stable_sort(d.records.begin(), d.records.end(), [](const auto& a, const auto& b) {
    if (a.stock != b.stock) return a.stock < b.stock;
    return a.date < b.date;
  });

  std::set<std::string> tickers;
  std::set<Date> dates;
  for (const auto& r : d.records) {
    tickers.insert(r.stock);
    dates.insert(r.date);
  }
  d.tickers.assign(tickers.begin(), tickers.end());
  d.dates.assign(dates.begin(), dates.end());
  return d;
}

Dataset dedup(const Dataset& d) {
  Dataset out;
  out.attribute_count = d.attribute_count;
  out.schema_anomalies = d.schema_anomalies;
  out.tickers = d.tickers;
  out.dates = d.dates;
  out.records.reserve(d.records.size());
  // Records are sorted, so exact duplicates are adjacent.
  for (const auto& r : d.records) {
    if (out.records.empty() || !(out.records.back() == r)) out.records.push_back(r);
  }
  return out;
}

ValidationReport validate(const Dataset& d) {
  if (d.attribute_count != std::size(kAttributeNames)) {
    throw SchemaViolation("expected 16 attributes, header has " +
                          std::to_string(d.attribute_count));
  }
  for (const auto& a : d.schema_anomalies) {
    throw SchemaViolation("row " + std::to_string(a.row) + " has " +
                          std::to_string(a.field_count) + " fields, expected " +
                          std::to_string(d.attribute_count));
  }

  ValidationReport rep;
  rep.row_count = d.records.size();
  rep.ticker_count = d.tickers.size();
  rep.week_count = d.dates.size();
  rep.attribute_count = d.attribute_count;

  std::map<std::pair<std::string, Date>, int> cell_count;
  std::map<std::string, Date> first_week;
  for (const auto& r : d.records) {
    ++cell_count[{r.stock, r.date}];
    auto it = first_week.find(r.stock);
    if (it == first_week.end() || r.date < it->second) first_week[r.stock] = r.date;
  }

  rep.grid_complete = true;
  for (const auto& t : d.tickers) {
    for (const auto& dt : d.dates) {
      auto it = cell_count.find({t, dt});
      int n = it == cell_count.end() ? 0 : it->second;
      if (n == 0) {
        rep.grid_complete = false;
        rep.warnings.push_back("missing record for (" + t + ", " + dt.iso() + ")");
      } else if (n > 1) {
        rep.grid_complete = false;
        rep.warnings.push_back("(" + t + ", " + dt.iso() + ") appears " + std::to_string(n) +
                               " times");
      }
    }
  }

  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    double implied = 100.0 * (r.close - r.open) / r.open;
    if (std::abs(implied - r.percent_change_price) > 0.05) {
      rep.warnings.push_back("(" + r.stock + ", " + r.date.iso() +
                             "): percent_change_price " + fmt6(r.percent_change_price) +
                             " disagrees with prices (implied " + fmt6(implied) + ")");
    }
    bool first = first_week[r.stock] == r.date;
    if (!first && (!r.percent_change_volume_over_last_wk || !r.previous_weeks_volume)) {
      rep.warnings.push_back("(" + r.stock + ", " + r.date.iso() +
                             "): optional volume fields absent after the first week; row kept");
    }
  }

  return rep;
}

std::pair<Dataset, ValidationReport> load_and_validate(const std::string& path) {
  Dataset parsed = parse_dataset(path);
  std::size_t before = parsed.records.size();
  Dataset clean = dedup(parsed);
  ValidationReport rep = validate(clean);
  rep.duplicates_removed = static_cast<long long>(before - clean.records.size());
  return {std::move(clean), std::move(rep)};
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "validation report\n";
  os << "  rows:       " << row_count << "\n";
  os << "  tickers:    " << ticker_count << "\n";
  os << "  weeks:      " << week_count << "\n";
  os << "  attributes: " << attribute_count << "\n";
  os << "  grid complete: " << (grid_complete ? "yes" : "no") << "\n";
  if (duplicates_removed >= 0) os << "  duplicates removed: " << duplicates_removed << "\n";
  os << "  warnings:   " << warnings.size() << "\n";
  for (const auto& w : warnings) os << "    - " << w << "\n";
  return os.str();
}

std::string ValidationReport::to_kv() const {
  std::ostringstream os;
  os << "validation.rows=" << row_count << "\n";
  os << "validation.tickers=" << ticker_count << "\n";
  os << "validation.weeks=" << week_count << "\n";
  os << "validation.attributes=" << attribute_count << "\n";
  os << "validation.grid_complete=" << (grid_complete ? 1 : 0) << "\n";
  if (duplicates_removed >= 0) os << "validation.duplicates_removed=" << duplicates_removed << "\n";
  os << "validation.warning_count=" << warnings.size() << "\n";
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    os << "validation.warning." << i << "=" << warnings[i] << "\n";
  }
  return os.str();
}

}  // namespace dowlab::ingest
