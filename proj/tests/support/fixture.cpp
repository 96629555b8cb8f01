#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include "dowlab/rng.hpp"
#include "dowlab/text.hpp"
#include "testsupport.hpp"

namespace testsupport {

namespace {

const std::array<const char*, 30> kTickers = {
    "AA", "AXP", "BA",  "BAC", "CAT", "CSCO", "CVX", "DD",  "DIS", "GE",
    "HD", "HPQ", "IBM", "INTC", "JNJ", "JPM", "KO",  "KRFT", "MCD", "MMM",
    "MRK", "MSFT", "PFE", "PG",  "T",  "TRV", "UTX", "VZ",  "WMT", "XOM"};

struct Day {
  int y, m, d;
};

Day add_days(Day day, int n) {
  static const int lens[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  for (int i = 0; i < n; ++i) {
    ++day.d;
    int len = lens[day.m - 1];
    if (day.m == 2 && (day.y % 4 == 0 && (day.y % 100 != 0 || day.y % 400 == 0))) len = 29;
    if (day.d > len) {
      day.d = 1;
      ++day.m;
      if (day.m > 12) {
        day.m = 1;
        ++day.y;
      }
    }
  }
  return day;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string money(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "$%.2f", v);
  return buf;
}

std::string num(double v) { return dowlab::fmt6(v); }

struct Week {
  double open, high, low, close;
  long long volume;
};

}  // namespace

void write_fixture_csv(const std::string& path, std::uint64_t seed) {
  const int kWeeks = 25;  // plus one synthesized week for the next_* columns

  // 25 consecutive Fridays starting 2011-01-07; the first 12 are quarter 1.
  std::vector<Day> days;
  Day d{2011, 1, 7};
  for (int w = 0; w < kWeeks; ++w) {
    days.push_back(d);
    d = add_days(d, 7);
  }

  std::vector<std::vector<Week>> walk(kTickers.size());
  for (std::size_t t = 0; t < kTickers.size(); ++t) {
    std::mt19937_64 rng(dowlab::derive_seed(seed, t));
    std::uniform_real_distribution<double> move(-0.045, 0.045);
    std::uniform_real_distribution<double> wick(0.0, 0.02);
    std::uniform_real_distribution<double> gap(-0.01, 0.01);
    std::uniform_real_distribution<double> start(20.0, 120.0);
    std::uniform_real_distribution<double> vol_jitter(0.7, 1.3);
    double base_volume = 4e7 + 2e8 * wick(rng) * 50;  // 40M..240M per ticker

    double open = round2(start(rng));
    for (int w = 0; w < kWeeks + 1; ++w) {
      Week wk;
      wk.open = open;
      wk.close = round2(open * (1 + move(rng)));
      double hi = std::max(wk.open, wk.close);
      double lo = std::min(wk.open, wk.close);
      wk.high = round2(hi * (1 + wick(rng)));
      wk.low = round2(lo * (1 - wick(rng)));
      wk.volume = static_cast<long long>(base_volume * vol_jitter(rng));
      walk[t].push_back(wk);
      open = round2(wk.close * (1 + gap(rng)));
    }
  }

  // Pin the first row of the file to the known opening week so the parsing
  // of "$15.82" and "1/7/2011" is checked against fixed strings.
  walk[0][0] = {15.82, 16.72, 15.78, 16.42, 239655616};

  std::ostringstream out;
  out << "quarter,stock,date,open,high,low,close,volume,percent_change_price,"
         "percent_change_volume_over_last_wk,previous_weeks_volume,next_weeks_open,"
         "next_weeks_close,percent_change_next_weeks_price,days_to_next_dividend,"
         "percent_return_next_dividend\n";

  for (int quarter = 1; quarter <= 2; ++quarter) {
    for (std::size_t t = 0; t < kTickers.size(); ++t) {
      std::mt19937_64 rng(dowlab::derive_seed(seed ^ 0x5eedULL, t));
      std::uniform_int_distribution<int> dividend_days(1, 92);
      std::uniform_real_distribution<double> dividend_ret(0.1, 1.2);
      for (int w = 0; w < kWeeks; ++w) {
        int q = w < 12 ? 1 : 2;
        int days_to_div = dividend_days(rng);
        double div_ret = dividend_ret(rng);
        if (q != quarter) continue;
        const Week& wk = walk[t][static_cast<std::size_t>(w)];
        const Week& nx = walk[t][static_cast<std::size_t>(w) + 1];
        out << q << "," << kTickers[t] << "," << days[static_cast<std::size_t>(w)].m << "/"
            << days[static_cast<std::size_t>(w)].d << "/" << days[static_cast<std::size_t>(w)].y
            << "," << money(wk.open) << "," << money(wk.high) << "," << money(wk.low) << ","
            << money(wk.close) << "," << wk.volume << ","
            << num((wk.close - wk.open) / wk.open * 100);
        if (w == 0) {
          out << ",,";
        } else {
          const Week& pv = walk[t][static_cast<std::size_t>(w) - 1];
          out << ","
              << num((static_cast<double>(wk.volume) - static_cast<double>(pv.volume)) /
                     static_cast<double>(pv.volume) * 100)
              << "," << pv.volume;
        }
        out << "," << money(nx.open) << "," << money(nx.close) << ","
            << num((nx.close - nx.open) / nx.open * 100) << "," << days_to_div << ","
            << num(div_ret) << "\n";
      }
    }
  }
  dowlab::write_file(path, out.str());
}

std::string dataset_path(const std::string& dir) {
  if (const char* env = std::getenv("DOWLAB_DATA"); env && *env) return env;
  std::string path = dir + "/fixture.csv";
  write_fixture_csv(path);
  return path;
}

}  // namespace testsupport
