#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "dowlab/date.hpp"
#include "dowlab/errors.hpp"
#include "dowlab/ingest.hpp"
#include "dowlab/text.hpp"
#include "testsupport.hpp"

using namespace dowlab;
using namespace dowlab::ingest;

namespace {

const char* kHeader =
    "quarter,stock,date,open,high,low,close,volume,percent_change_price,"
    "percent_change_volume_over_last_wk,previous_weeks_volume,next_weeks_open,"
    "next_weeks_close,percent_change_next_weeks_price,days_to_next_dividend,"
    "percent_return_next_dividend";

// The opening two weeks of one stock, dollar signs and blanks as in the raw
// file.
const char* kRow1 =
    "1,AA,1/7/2011,$15.82,$16.72,$15.78,$16.42,239655616,3.79267,,,$16.71,$15.97,-4.42849,26,"
    "0.182704";
const char* kRow2 =
    "1,AA,1/14/2011,$16.71,$16.71,$15.64,$15.97,242963398,-4.42849,1.380223,239655616,$16.19,"
    "$15.79,-2.47066,19,0.187852";

std::string write_csv(const std::string& dir, const std::string& name,
                      const std::vector<std::string>& lines) {
  std::string body;
  for (const auto& l : lines) body += l + "\n";
  std::string path = dir + "/" + name;
  write_file(path, body);
  return path;
}

}  // namespace

TEST_CASE("dollar amounts parse with optional sign, $, and separators") {
  CHECK(parse_dollar("$15.82") == 15.82);
  CHECK(parse_dollar("15.82") == 15.82);
  CHECK(parse_dollar("$1,234.56") == 1234.56);
  CHECK(parse_dollar("$12,345,678") == 12345678.0);
  CHECK(parse_dollar("-$3.50") == -3.5);
  CHECK(parse_dollar("$0.01") == 0.01);

  CHECK_FALSE(parse_dollar(""));
  CHECK_FALSE(parse_dollar("$"));
  CHECK_FALSE(parse_dollar("abc"));
  CHECK_FALSE(parse_dollar("$1,23.45"));    // group of two
  CHECK_FALSE(parse_dollar("$12,3456"));    // group of four
  CHECK_FALSE(parse_dollar("1234,567"));    // separator after four digits
  CHECK_FALSE(parse_dollar("$1.2.3"));
  CHECK_FALSE(parse_dollar("$5e3"));        // no scientific notation in money
  CHECK_FALSE(parse_dollar("$ 5"));
}

TEST_CASE("dates parse from m/d/yyyy and from ISO") {
  auto d = Date::parse_mdy("1/7/2011");
  REQUIRE(d);
  CHECK(d->year == 2011);
  CHECK(d->month == 1);
  CHECK(d->day == 7);
  CHECK(d->iso() == "2011-01-07");

  CHECK(Date::parse_mdy("12/31/2011"));
  CHECK(Date::parse_mdy("02/28/2011"));
  CHECK(Date::parse("2011-01-07") == Date::parse_mdy("1/7/2011"));

  CHECK_FALSE(Date::parse_mdy("2/30/2011"));   // no such day
  CHECK_FALSE(Date::parse_mdy("13/1/2011"));   // no such month
  CHECK_FALSE(Date::parse_mdy("2/29/2011"));   // 2011 is not a leap year
  CHECK(Date::parse_mdy("2/29/2012"));         // 2012 is
  CHECK_FALSE(Date::parse_mdy("1-7-2011"));
  CHECK_FALSE(Date::parse_mdy("1/7/2011 "));
}

TEST_CASE("a raw week row lands in typed fields") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = write_csv(dir, "one.csv", {kHeader, kRow1});
  Dataset d = parse_dataset(path);

  REQUIRE(d.records.size() == 1);
  const WeeklyRecord& r = d.records[0];
  CHECK(r.quarter == 1);
  CHECK(r.stock == "AA");
  CHECK(r.date.iso() == "2011-01-07");
  CHECK(r.open == 15.82);
  CHECK(r.high == 16.72);
  CHECK(r.low == 15.78);
  CHECK(r.close == 16.42);
  CHECK(r.volume == 239655616);
  CHECK(r.percent_change_price == doctest::Approx(3.79267));
  CHECK_FALSE(r.percent_change_volume_over_last_wk.has_value());
  CHECK_FALSE(r.previous_weeks_volume.has_value());
  CHECK(r.next_weeks_open == 16.71);
  CHECK(r.next_weeks_close == 15.97);
  CHECK(r.days_to_next_dividend == 26);
  CHECK(r.percent_return_next_dividend == doctest::Approx(0.182704));
}

TEST_CASE("second week fills the history-dependent fields") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = write_csv(dir, "two.csv", {kHeader, kRow1, kRow2});
  Dataset d = parse_dataset(path);

  REQUIRE(d.records.size() == 2);
  const WeeklyRecord& r = d.records[1];
  REQUIRE(r.percent_change_volume_over_last_wk.has_value());
  CHECK(*r.percent_change_volume_over_last_wk == doctest::Approx(1.380223));
  REQUIRE(r.previous_weeks_volume.has_value());
  CHECK(*r.previous_weeks_volume == 239655616);
}

TEST_CASE("records sort by stock then date regardless of file order") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = write_csv(
      dir, "shuffled.csv",
      {kHeader,
       "1,BA,1/14/2011,$70.00,$71.00,$69.00,$70.50,1000,0.714286,,,$70.00,$70.00,0,10,0.5",
       "1,AA,1/14/2011,$16.00,$16.50,$15.50,$16.10,1000,0.625,,,$16.00,$16.00,0,10,0.5",
       "1,BA,1/7/2011,$69.00,$70.00,$68.00,$69.50,1000,0.724638,,,$70.00,$70.50,0.714286,17,0.5",
       "1,AA,1/7/2011,$15.82,$16.72,$15.78,$16.42,1000,3.79267,,,$16.00,$16.10,0.625,17,0.5"});
  Dataset d = parse_dataset(path);

  REQUIRE(d.records.size() == 4);
  CHECK(d.records[0].stock == "AA");
  CHECK(d.records[0].date.iso() == "2011-01-07");
  CHECK(d.records[1].stock == "AA");
  CHECK(d.records[1].date.iso() == "2011-01-14");
  CHECK(d.records[2].stock == "BA");
  CHECK(d.records[2].date.iso() == "2011-01-07");
  CHECK(d.records[3].stock == "BA");
  CHECK(d.records[3].date.iso() == "2011-01-14");
  CHECK(d.tickers == std::vector<std::string>{"AA", "BA"});
  REQUIRE(d.dates.size() == 2);
  CHECK(d.dates[0].iso() == "2011-01-07");
}

TEST_CASE("header order does not matter, lookup is by name") {
  auto dir = testsupport::make_temp_dir("ingest");
  // stock and quarter swapped.
  auto path = write_csv(
      dir, "reordered.csv",
      {"stock,quarter,date,open,high,low,close,volume,percent_change_price,"
       "percent_change_volume_over_last_wk,previous_weeks_volume,next_weeks_open,"
       "next_weeks_close,percent_change_next_weeks_price,days_to_next_dividend,"
       "percent_return_next_dividend",
       "AA,1,1/7/2011,$15.82,$16.72,$15.78,$16.42,1000,3.79267,,,$16.00,$16.10,0.625,17,0.5"});
  Dataset d = parse_dataset(path);
  REQUIRE(d.records.size() == 1);
  CHECK(d.records[0].stock == "AA");
  CHECK(d.records[0].quarter == 1);
}

TEST_CASE("field failures throw MalformedRow naming the row and field") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto row_with = [&](int pos, const std::string& value) {
    auto fields = split(kRow1, ',');
    fields[static_cast<std::size_t>(pos)] = value;
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
    return write_csv(dir, "bad.csv", {kHeader, kRow1, line});
  };

  auto expect_malformed = [&](const std::string& path, const char* field) {
    try {
      parse_dataset(path);
      FAIL_CHECK("expected MalformedRow for field " << field);
    } catch (const MalformedRow& e) {
      CHECK(e.row == 2);
      CHECK(e.field == field);
    }
  };

  expect_malformed(row_with(3, "garbage"), "open");   // unparseable price
  expect_malformed(row_with(0, "3"), "quarter");      // out of domain
  expect_malformed(row_with(0, "x"), "quarter");
  expect_malformed(row_with(2, "31/1/2011"), "date");
  expect_malformed(row_with(7, "-5"), "volume");      // negative share count
  expect_malformed(row_with(7, "1.5"), "volume");     // fractional share count
  expect_malformed(row_with(8, "n/a"), "percent_change_price");
  expect_malformed(row_with(1, " "), "stock");

  // low above high violates the record invariant.
  auto fields = split(kRow1, ',');
  fields[5] = "$99.99";
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
  expect_malformed(write_csv(dir, "bad.csv", {kHeader, kRow1, line}), "low");
}

TEST_CASE("a missing header column is reported by name") {
  auto dir = testsupport::make_temp_dir("ingest");
  std::string header(kHeader);
  auto pos = header.find(",volume");
  header.erase(pos, 7);
  auto path = write_csv(dir, "noheader.csv", {header, kRow1});
  try {
    parse_dataset(path);
    FAIL_CHECK("expected MissingColumn");
  } catch (const MissingColumn& e) {
    CHECK(e.column == "volume");
  }
}

TEST_CASE("a row with the wrong field count is rejected at validation") {
  auto dir = testsupport::make_temp_dir("ingest");
  std::string short_row(kRow1);
  short_row.erase(short_row.rfind(','));  // drop the last field -> 15 columns
  auto path = write_csv(dir, "width.csv", {kHeader, kRow1, short_row});

  Dataset d = parse_dataset(path);
  CHECK(d.records.size() == 1);  // the good row still parses
  REQUIRE(d.schema_anomalies.size() == 1);
  CHECK(d.schema_anomalies[0].row == 2);
  CHECK(d.schema_anomalies[0].field_count == 15);
  CHECK_THROWS_AS(validate(d), SchemaViolation);
}

TEST_CASE("a header with extra columns fails validation but not parsing") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = write_csv(dir, "extra.csv",
                        {std::string(kHeader) + ",mystery", std::string(kRow1) + ",42"});
  Dataset d = parse_dataset(path);
  CHECK(d.attribute_count == 17);
  CHECK(d.records.size() == 1);
  CHECK_THROWS_AS(validate(d), SchemaViolation);
}

TEST_CASE("exact duplicate rows are dropped and counted") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = write_csv(dir, "dup.csv", {kHeader, kRow1, kRow1, kRow2});
  auto [d, rep] = load_and_validate(path);
  CHECK(d.records.size() == 2);
  CHECK(rep.duplicates_removed == 1);
  CHECK(rep.grid_complete);
  CHECK(rep.warnings.empty());
}

TEST_CASE("conflicting rows for the same week are kept and flagged") {
  auto dir = testsupport::make_temp_dir("ingest");
  std::string variant(kRow1);
  auto pos = variant.find(",26,");
  variant.replace(pos, 4, ",27,");  // same (stock, date), different dividend gap
  auto path = write_csv(dir, "conflict.csv", {kHeader, kRow1, variant});
  auto [d, rep] = load_and_validate(path);
  CHECK(d.records.size() == 2);
  CHECK(rep.duplicates_removed == 0);
  CHECK_FALSE(rep.grid_complete);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("(AA, 2011-01-07) appears 2 times") != std::string::npos);
}

TEST_CASE("a hole in the stock-week grid is flagged") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = write_csv(
      dir, "hole.csv",
      {kHeader, kRow1, kRow2,
       "1,BA,1/7/2011,$69.00,$70.00,$68.00,$69.50,1000,0.724638,,,$70.00,$70.50,0.714286,17,0.5"});
  auto [d, rep] = load_and_validate(path);
  CHECK_FALSE(rep.grid_complete);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("missing record for (BA, 2011-01-14)") != std::string::npos);
}

TEST_CASE("stated percent change must match the prices") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto fields = split(kRow1, ',');
  fields[8] = "10.0";  // implied is 3.79
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
  auto path = write_csv(dir, "drift.csv", {kHeader, line});
  auto [d, rep] = load_and_validate(path);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("disagrees") != std::string::npos);
}

TEST_CASE("optional fields missing after the first week draw a warning") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto fields = split(kRow2, ',');
  fields[9] = "";
  fields[10] = "";
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
  auto path = write_csv(dir, "optional.csv", {kHeader, kRow1, line});
  auto [d, rep] = load_and_validate(path);
  CHECK(d.records.size() == 2);  // row kept
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("volume fields absent") != std::string::npos);
}

TEST_CASE("an unreadable path raises IoError") {
  CHECK_THROWS_AS(parse_dataset("/nonexistent/nowhere.csv"), IoError);
}

TEST_CASE("attribute name table matches the raw layout") {
  const auto& names = attribute_names();
  REQUIRE(names.size() == 16);
  CHECK(names.front() == "quarter");
  CHECK(names[2] == "date");
  CHECK(names.back() == "percent_return_next_dividend");
}

TEST_CASE("the full dataset loads with the documented shape and no warnings") {
  auto dir = testsupport::make_temp_dir("ingest");
  auto path = testsupport::dataset_path(dir);
  auto [d, rep] = load_and_validate(path);

  CHECK(rep.row_count == 750);
  CHECK(rep.ticker_count == 30);
  CHECK(rep.week_count == 25);
  CHECK(rep.attribute_count == 16);
  CHECK(rep.grid_complete);
  CHECK(rep.duplicates_removed == 0);
  CHECK(rep.warnings.empty());

  // 12 quarter-1 weeks and 13 quarter-2 weeks per stock.
  std::size_t q1 = 0;
  for (const auto& r : d.records) q1 += r.quarter == 1 ? 1 : 0;
  CHECK(q1 == 360);
  CHECK(d.records.size() - q1 == 390);

  const WeeklyRecord& first = d.records.front();
  CHECK(first.stock == "AA");
  CHECK(first.date.iso() == "2011-01-07");
  CHECK(first.open == 15.82);
  CHECK(first.close == 16.42);
  CHECK(first.volume == 239655616);
  CHECK_FALSE(first.percent_change_volume_over_last_wk.has_value());
  CHECK(d.records[1].percent_change_volume_over_last_wk.has_value());

  std::string text = rep.to_text();
  CHECK(text.find("750") != std::string::npos);
  CHECK(rep.to_kv().find("validation.grid_complete=1") != std::string::npos);
}
