#include "dowlab/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>

#include "dowlab/csv.hpp"
#include "dowlab/errors.hpp"
#include "dowlab/text.hpp"

namespace dowlab::features {

namespace {

std::map<Date, std::size_t> index_dates(const std::vector<Date>& dates) {
  std::map<Date, std::size_t> idx;
  for (std::size_t j = 0; j < dates.size(); ++j) idx[dates[j]] = j;
  return idx;
}

}  // namespace

std::size_t ReturnMatrix::ticker_index(const std::string& t) const {
  auto it = std::find(tickers.begin(), tickers.end(), t);
  if (it == tickers.end()) throw UnknownTicker(t);
  return static_cast<std::size_t>(it - tickers.begin());
}

ReturnMatrix pivot_returns(const Dataset& d) {
  ReturnMatrix r;
  r.tickers = d.tickers;
  r.dates = d.dates;
  r.values = Matrix(r.tickers.size(), r.dates.size(),
                    std::numeric_limits<double>::quiet_NaN());

  auto date_idx = index_dates(r.dates);
  std::map<std::string, std::size_t> ticker_idx;
  for (std::size_t i = 0; i < r.tickers.size(); ++i) ticker_idx[r.tickers[i]] = i;

  for (const auto& rec : d.records) {
    r.values(ticker_idx[rec.stock], date_idx[rec.date]) = rec.percent_change_price;
  }
  for (std::size_t i = 0; i < r.tickers.size(); ++i) {
    for (std::size_t j = 0; j < r.dates.size(); ++j) {
      if (std::isnan(r.values(i, j))) throw MissingCell(r.tickers[i], r.dates[j].iso());
    }
  }
  return r;
}

MarketValueTable market_values(const Dataset& d) {
  MarketValueTable mv;
  mv.tickers = d.tickers;
  mv.dates = d.dates;
  mv.values = Matrix(mv.tickers.size(), mv.dates.size());

  auto date_idx = index_dates(mv.dates);
  std::map<std::string, std::size_t> ticker_idx;
  for (std::size_t i = 0; i < mv.tickers.size(); ++i) ticker_idx[mv.tickers[i]] = i;

  for (const auto& rec : d.records) {
    mv.values(ticker_idx[rec.stock], date_idx[rec.date]) =
        rec.close * static_cast<double>(rec.volume);
  }
  return mv;
}

Series compute_mkt(const ReturnMatrix& r, const MarketValueTable& mv) {
  std::size_t n = r.tickers.size();
  std::size_t weeks = r.dates.size();
  Series out(weeks);
  for (std::size_t j = 0; j < weeks; ++j) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += mv.values(i, j);
    if (total == 0) throw DegenerateWeek(j, "total market value is zero");
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += (mv.values(i, j) / total) * r.values(i, j);
    out[j] = acc;
  }
  return out;
}

Series compute_smb(const ReturnMatrix& r, const MarketValueTable& mv) {
  std::size_t n = r.tickers.size();
  if (n < 2) throw DegenerateWeek(0, "need at least 2 tickers for a size split");
  std::size_t weeks = r.dates.size();
  std::size_t half = n / 2;
  Series out(weeks);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < weeks; ++j) {
    double lo = mv.values(0, j), hi = mv.values(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, mv.values(i, j));
      hi = std::max(hi, mv.values(i, j));
    }
    if (lo == hi) throw DegenerateWeek(j, "all market values equal, no size split");

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (mv.values(a, j) != mv.values(b, j)) return mv.values(a, j) < mv.values(b, j);
      return r.tickers[a] < r.tickers[b];
    });

    double small = 0, big = 0;
    for (std::size_t i = 0; i < half; ++i) small += r.values(order[i], j);
    for (std::size_t i = n - half; i < n; ++i) big += r.values(order[i], j);
    out[j] = small / static_cast<double>(half) - big / static_cast<double>(half);
  }
  return out;
}

std::pair<Series, Series> compute_index_and_volume(
    const Dataset& d, const MarketValueTable& mv,
    const std::optional<DatedSeries>& external_index) {
  std::size_t weeks = mv.dates.size();
  Series volume(weeks, 0.0);
  Series sum_open(weeks, 0.0);
  Series sum_close(weeks, 0.0);
  auto date_idx = index_dates(mv.dates);
  for (const auto& rec : d.records) {
    std::size_t j = date_idx[rec.date];
    volume[j] += static_cast<double>(rec.volume);
    sum_open[j] += rec.open;
    sum_close[j] += rec.close;
  }

  Series index(weeks);
  if (external_index) {
    index = external_index->align_to(mv.dates);
  } else {
    // Price-weighted proxy: a flat-divisor average of these stocks moves by
    // (sum of closes - sum of opens) / sum of opens. Deliberately not the
    // value-weighted market factor, which is a separate regressor.
    for (std::size_t j = 0; j < weeks; ++j) {
      if (sum_open[j] <= 0) throw DegenerateWeek(j, "total open price is not positive");
      index[j] = 100.0 * (sum_close[j] - sum_open[j]) / sum_open[j];
    }
  }
  return {std::move(index), std::move(volume)};
}

Series log_transform(const Series& prices) {
  Series out(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (prices[i] <= 0) throw NonPositiveInput(i);
    out[i] = std::log(prices[i]);
  }
  return out;
}

std::vector<HistogramBin> histogram(const Series& values, std::size_t bin_count) {
  if (values.empty()) throw EmptySeries();
  if (bin_count < 1) throw Error("bin_count must be at least 1");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    return {HistogramBin{lo, hi, values.size()}};
  }
  std::vector<HistogramBin> bins(bin_count);
  double width = (hi - lo) / static_cast<double>(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) {
    bins[b].lo = lo + width * static_cast<double>(b);
    bins[b].hi = lo + width * static_cast<double>(b + 1);
  }
  bins.back().hi = hi;
  for (double v : values) {
    // Right-closed bins: a value on a shared edge belongs to the lower bin.
    double offset = (v - lo) / width;
    long long idx = static_cast<long long>(std::ceil(offset)) - 1;
    if (idx < 0) idx = 0;
    if (idx >= static_cast<long long>(bin_count)) idx = static_cast<long long>(bin_count) - 1;
    ++bins[static_cast<std::size_t>(idx)].count;
  }
  return bins;
}

DatedSeries DatedSeries::load(const std::string& path) {
  auto rows = read_csv(path);
  DatedSeries s;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 2) throw IoError(path, "row " + std::to_string(i + 1) + ": expected date,value");
    std::string first = trim(row[0]);
    auto date = Date::parse(first);
    if (!date) {
      if (i == 0) continue;  // header line
      throw IoError(path, "row " + std::to_string(i + 1) + ": bad date '" + first + "'");
    }
    char* end = nullptr;
    std::string vtext = trim(row[1]);
    double v = std::strtod(vtext.c_str(), &end);
    if (end != vtext.c_str() + vtext.size())
      throw IoError(path, "row " + std::to_string(i + 1) + ": bad value '" + vtext + "'");
    s.dates.push_back(*date);
    s.values.push_back(v);
  }
  return s;
}

Series DatedSeries::align_to(const std::vector<Date>& axis) const {
  std::map<Date, double> by_date;
  for (std::size_t i = 0; i < dates.size(); ++i) by_date[dates[i]] = values[i];
  Series out;
  out.reserve(axis.size());
  for (const auto& d : axis) {
    auto it = by_date.find(d);
    if (it == by_date.end()) throw MissingCell("series", d.iso());
    out.push_back(it->second);
  }
  return out;
}

FactorSeries build_factors(const Dataset& d, const ReturnMatrix& r, const MarketValueTable& mv,
                           const FactorOptions& opts) {
  FactorSeries f;
  f.dates = r.dates;
  f.mkt = compute_mkt(r, mv);
  f.smb = compute_smb(r, mv);
  auto [index, volume] = compute_index_and_volume(d, mv, opts.index);
  f.index_return = std::move(index);
  f.total_volume = std::move(volume);
  f.hml = opts.hml ? opts.hml->align_to(f.dates) : Series(f.dates.size(), 0.0);
  f.risk_free = opts.risk_free ? opts.risk_free->align_to(f.dates) : Series(f.dates.size(), 0.0);
  return f;
}

DesignMatrix build_design_matrix(const Dataset& d, const ReturnMatrix& r, const FactorSeries& f,
                                 const Series& cluster_feature, const std::string& target,
                                 const std::vector<std::size_t>& train_rows) {
  std::size_t row_idx = r.ticker_index(target);
  (void)row_idx;
  if (f.dates != r.dates) throw DimensionMismatch("factor dates do not match the return matrix");
  if (cluster_feature.size() != r.dates.size())
    throw DimensionMismatch("cluster feature length does not match the week axis");

  // Next-week target per week for the chosen ticker.
  std::vector<std::optional<double>> targets(r.dates.size());
  auto date_idx = index_dates(r.dates);
  for (const auto& rec : d.records) {
    if (rec.stock == target) targets[date_idx[rec.date]] = rec.percent_change_next_weeks_price;
  }

  DesignMatrix dm;
  dm.target = target;
  dm.columns = {"index_return", "volume_std", "smb", "mkt", "cluster"};
  for (std::size_t j = 0; j < r.dates.size(); ++j) {
    if (targets[j]) dm.week_index.push_back(j);
  }

  std::size_t rows = dm.week_index.size();
  dm.x = Matrix(rows, dm.columns.size());
  dm.y.resize(rows);

  // Volume standardization statistics over the training rows (all rows when
  // none are given), so no held-out statistics leak into the features.
  double mean = 0, sd = 0;
  {
    const std::vector<std::size_t>* basis = &dm.week_index;
    std::vector<std::size_t> train_weeks;
    if (!train_rows.empty()) {
      for (std::size_t t : train_rows) {
        if (t >= rows) throw DimensionMismatch("train row index out of range");
        train_weeks.push_back(dm.week_index[t]);
      }
      basis = &train_weeks;
    }
    for (std::size_t j : *basis) mean += f.total_volume[j];
    mean /= static_cast<double>(basis->size());
    for (std::size_t j : *basis) {
      double dev = f.total_volume[j] - mean;
      sd += dev * dev;
    }
    sd = basis->size() > 1 ? std::sqrt(sd / static_cast<double>(basis->size() - 1)) : 0.0;
  }

  for (std::size_t row = 0; row < rows; ++row) {
    std::size_t j = dm.week_index[row];
    dm.x(row, 0) = f.index_return[j];
    dm.x(row, 1) = sd > 0 ? (f.total_volume[j] - mean) / sd : 0.0;
    dm.x(row, 2) = f.smb[j];
    dm.x(row, 3) = f.mkt[j];
    dm.x(row, 4) = cluster_feature[j];
    dm.y[row] = *targets[dm.week_index[row]];
  }
  return dm;
}

}  // namespace dowlab::features
