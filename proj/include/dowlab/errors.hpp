#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dowlab {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- ingest ---

struct MalformedRow : Error {
  std::size_t row;
  std::string field;
  MalformedRow(std::size_t row_index, std::string field_name, const std::string& detail)
      : Error("malformed row " + std::to_string(row_index) + ", field '" + field_name +
              "': " + detail),
        row(row_index),
        field(std::move(field_name)) {}
};

struct MissingColumn : Error {
  std::string column;
  explicit MissingColumn(std::string name)
      : Error("header is missing column '" + name + "'"), column(std::move(name)) {}
};

struct SchemaViolation : Error {
  using Error::Error;
};

// --- features ---

struct MissingCell : Error {
  std::string ticker;
  std::string date;
  MissingCell(std::string t, std::string d)
      : Error("no record for (" + t + ", " + d + ")"), ticker(std::move(t)), date(std::move(d)) {}
};

struct DegenerateWeek : Error {
  std::size_t week;
  DegenerateWeek(std::size_t week_index, const std::string& detail)
      : Error("degenerate week " + std::to_string(week_index) + ": " + detail),
        week(week_index) {}
};

struct NonPositiveInput : Error {
  std::size_t index;
  explicit NonPositiveInput(std::size_t i)
      : Error("non-positive value at index " + std::to_string(i)), index(i) {}
};

struct EmptySeries : Error {
  EmptySeries() : Error("series is empty") {}
};

struct UnknownTicker : Error {
  std::string ticker;
  explicit UnknownTicker(std::string t) : Error("unknown ticker '" + t + "'"), ticker(std::move(t)) {}
};

// --- clustering ---

struct InvalidK : Error {
  using Error::Error;
};

struct EmptyMatrix : Error {
  EmptyMatrix() : Error("matrix has no rows") {}
};

// --- models ---

struct RankDeficient : Error {
  std::size_t column;
  std::string name;
  RankDeficient(std::size_t col, std::string col_name)
      : Error("design matrix column " + std::to_string(col) + " ('" + col_name +
              "') is linearly dependent on earlier columns"),
        column(col),
        name(std::move(col_name)) {}
};

struct TooFewRows : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// --- evaluation ---

struct ZeroVariance : Error {
  ZeroVariance() : Error("target has zero variance") {}
};

struct DegenerateSplit : Error {
  using Error::Error;
};

// --- i/o ---

struct IoError : Error {
  std::string path;
  IoError(std::string p, const std::string& detail)
      : Error(p + ": " + detail), path(std::move(p)) {}
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dowlab
