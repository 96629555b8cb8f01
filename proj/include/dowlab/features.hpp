#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dowlab/date.hpp"
#include "dowlab/ingest.hpp"
#include "dowlab/matrix.hpp"

namespace dowlab::features {

using ingest::Dataset;

/// Stocks x weeks table of weekly percent price changes.
struct ReturnMatrix {
  std::vector<std::string> tickers;  // row labels
  std::vector<Date> dates;           // column labels, strictly increasing
  Matrix values;

  std::size_t ticker_index(const std::string& t) const;  // throws UnknownTicker
};

/// Stocks x weeks table of dollar trading value (close * volume).
/// The dataset carries no shares outstanding, so trading value is the
/// market-value proxy used for all size-based weighting.
struct MarketValueTable {
  std::vector<std::string> tickers;
  std::vector<Date> dates;
  Matrix values;
};

/// Per-week factor series sharing the ReturnMatrix date axis.
struct FactorSeries {
  std::vector<Date> dates;
  Series mkt;           // value-weighted market return, percent
  Series smb;           // small-minus-big return spread, percent
  Series hml;           // all-zero unless supplied externally
  Series index_return;  // price-weighted index proxy unless supplied externally
  Series total_volume;  // shares traded per week
  Series risk_free;     // percent per week; constant 0 unless supplied
};

/// A date,value series loaded from a two-column file (external factor input).
struct DatedSeries {
  std::vector<Date> dates;
  Series values;

  static DatedSeries load(const std::string& path);
  /// Reorders onto the given axis; throws MissingCell for an absent date.
  Series align_to(const std::vector<Date>& axis) const;
};

struct HistogramBin {
  double lo = 0;
  double hi = 0;
  std::size_t count = 0;
};

/// Regression design for one target ticker: one row per week with a defined
/// next-week target, columns in the fixed recorded order.
struct DesignMatrix {
  Matrix x;
  Series y;  // percent_change_next_weeks_price of the target
  std::vector<std::string> columns;
  std::vector<std::size_t> week_index;  // row -> index into the date axis
  std::string target;
};

ReturnMatrix pivot_returns(const Dataset& d);

MarketValueTable market_values(const Dataset& d);

/// Value-weighted cross-sectional mean return per week; weights are each
/// week's market values normalized to sum to 1.
Series compute_mkt(const ReturnMatrix& r, const MarketValueTable& mv);

/// Per week, tickers are ranked by market value; the bottom floor(n/2) form
/// the small group and the top floor(n/2) the big group (the middle stock of
/// an odd count joins neither). smb = mean(small returns) - mean(big returns).
Series compute_smb(const ReturnMatrix& r, const MarketValueTable& mv);

/// Index proxy and aggregate volume. Without an external index series the
/// index return is price-weighted -- the percent move of a flat-divisor
/// average of the stocks, (sum of closes - sum of opens) / sum of opens --
/// which keeps it linearly independent of the value-weighted market factor.
std::pair<Series, Series> compute_index_and_volume(
    const Dataset& d, const MarketValueTable& mv,
    const std::optional<DatedSeries>& external_index = std::nullopt);

/// Elementwise natural log; throws NonPositiveInput with the offending index.
Series log_transform(const Series& prices);

/// Equal-width bins spanning [min, max]. Bins close on the right: a value on
/// a shared edge falls in the lower bin, the minimum falls in bin 0, the
/// maximum in the last bin. A constant series yields a single bin.
std::vector<HistogramBin> histogram(const Series& values, std::size_t bin_count);

struct FactorOptions {
  std::optional<DatedSeries> risk_free;
  std::optional<DatedSeries> hml;
  std::optional<DatedSeries> index;
};

/// Assembles the full factor table for the matrix's date axis.
FactorSeries build_factors(const Dataset& d, const ReturnMatrix& r, const MarketValueTable& mv,
                           const FactorOptions& opts = {});

/// Columns, in order: index_return, total_volume (standardized), smb, mkt,
/// cluster_feature. Volume is standardized to zero mean / unit variance over
/// `train_rows` (all rows when empty) so raw share counts cannot dominate.
DesignMatrix build_design_matrix(const Dataset& d, const ReturnMatrix& r, const FactorSeries& f,
                                 const Series& cluster_feature, const std::string& target,
                                 const std::vector<std::size_t>& train_rows = {});

}  // namespace dowlab::features
