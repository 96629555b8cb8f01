#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dowlab/date.hpp"

namespace dowlab::ingest {

/// One row of the 16-attribute weekly dataset, typed and unit-normalized.
/// Dollar fields are plain doubles in USD, dates are calendar dates, and the
/// two fields that are blank on a stock's first observed week are optionals.
struct WeeklyRecord {
  int quarter = 0;  // 1 or 2
  std::string stock;
  Date date;
  double open = 0;
  double high = 0;
  double low = 0;
  double close = 0;
  std::int64_t volume = 0;
  double percent_change_price = 0;
  std::optional<double> percent_change_volume_over_last_wk;
  std::optional<std::int64_t> previous_weeks_volume;
  double next_weeks_open = 0;
  double next_weeks_close = 0;
  double percent_change_next_weeks_price = 0;
  int days_to_next_dividend = 0;
  double percent_return_next_dividend = 0;

  bool operator==(const WeeklyRecord&) const = default;
};

/// A row whose field count disagreed with the header, recorded at parse time
/// and rejected later by validate().
struct SchemaAnomaly {
  std::size_t row = 0;  // 1-based data row index
  std::size_t field_count = 0;
};

struct Dataset {
  std::vector<WeeklyRecord> records;        // sorted by (stock, date)
  std::vector<std::string> tickers;         // sorted, unique
  std::vector<Date> dates;                  // sorted, unique
  std::size_t attribute_count = 0;          // header column count
  std::vector<SchemaAnomaly> schema_anomalies;
};

struct ValidationReport {
  std::size_t row_count = 0;
  std::size_t ticker_count = 0;
  std::size_t week_count = 0;
  std::size_t attribute_count = 0;
  bool grid_complete = false;  // every (ticker, date) pair has exactly one record
  long long duplicates_removed = -1;  // filled by load_and_validate; -1 = unknown
  std::vector<std::string> warnings;

  std::string to_text() const;
  std::string to_kv() const;
};

/// Strips an optional leading '$' and well-placed thousands separators, then
/// parses a decimal number. Empty optional on anything else.
std::optional<double> parse_dollar(const std::string& text);

/// Parses, normalizes and sorts the raw weekly file.
/// Throws MalformedRow when a field fails to parse or violates a record
/// invariant, MissingColumn when the header lacks an expected attribute, and
/// IoError when the file is unreadable. Rows with the wrong field count are
/// recorded as schema anomalies for validate() to reject.
Dataset parse_dataset(const std::string& path);

/// Removes exact duplicate records, keeping the first occurrence. Idempotent
/// and order-preserving for retained rows.
Dataset dedup(const Dataset& d);

/// Checks counts and per-record consistency. Throws SchemaViolation when the
/// attribute count is not 16 or any row had the wrong width; everything else
/// (price-vs-percent disagreement beyond 0.05 points, optional fields absent
/// after a stock's first week, duplicate or missing grid cells) is a warning.
ValidationReport validate(const Dataset& d);

/// parse + dedup + validate, with the removed-duplicate count filled in.
std::pair<Dataset, ValidationReport> load_and_validate(const std::string& path);

/// The 16 attribute names of the raw file's header, in canonical order.
const std::vector<std::string>& attribute_names();

}  // namespace dowlab::ingest
