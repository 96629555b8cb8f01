#include "dowlab/figures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include "dowlab/errors.hpp"
#include "dowlab/svg.hpp"
#include "dowlab/text.hpp"

namespace dowlab::figures {

using ingest::Dataset;
using svg::Canvas;
using svg::LinScale;

Emitter::Emitter(std::string out_dir) : dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError(dir_, "cannot create directory: " + ec.message());
}

void Emitter::write(const std::string& name, const std::string& content) {
  write_file((std::filesystem::path(dir_) / name).string(), content);
  names_.push_back(name);
}

void Emitter::finish() {
  std::vector<std::string> all = names_;
  all.push_back("manifest.txt");
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::string manifest;
  for (const auto& n : all) manifest += n + "\n";
  write("manifest.txt", manifest);
}

namespace {

const std::array<const char*, 30> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
    "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5", "#393b79", "#637939", "#8c6d31", "#843c39",
    "#7b4173", "#5254a3", "#8ca252", "#bd9e39", "#ad494a", "#a55194"};

struct Grid {
  std::vector<std::string> tickers;
  std::vector<Date> dates;
  Matrix values;  // tickers x dates
};

Grid pivot_close(const Dataset& d, bool log_scale) {
  Grid g;
  g.tickers = d.tickers;
  g.dates = d.dates;
  g.values = Matrix(g.tickers.size(), g.dates.size(), std::numeric_limits<double>::quiet_NaN());
  std::map<std::string, std::size_t> trow;
  std::map<Date, std::size_t> dcol;
  for (std::size_t i = 0; i < g.tickers.size(); ++i) trow[g.tickers[i]] = i;
  for (std::size_t j = 0; j < g.dates.size(); ++j) dcol[g.dates[j]] = j;
  for (const auto& rec : d.records)
    g.values(trow.at(rec.stock), dcol.at(rec.date)) = log_scale ? std::log(rec.close) : rec.close;
  for (std::size_t i = 0; i < g.tickers.size(); ++i) {
    for (std::size_t j = 0; j < g.dates.size(); ++j) {
      if (std::isnan(g.values(i, j))) throw MissingCell(g.tickers[i], g.dates[j].iso());
    }
  }
  return g;
}

/// Integer tick positions 1, 1+s, ... for a week axis of length n.
std::vector<int> week_ticks(std::size_t n, int target) {
  int step = std::max<int>(1, static_cast<int>(std::llround(static_cast<double>(n) / target)));
  std::vector<int> ticks;
  for (int w = 1; w <= static_cast<int>(n); w += step) ticks.push_back(w);
  return ticks;
}

void draw_frame(Canvas& c, double x0, double y0, double x1, double y1, const LinScale& sx,
                const LinScale& sy, const std::vector<double>& xticks,
                const std::vector<double>& yticks) {
  for (double t : yticks) {
    double y = sy(t);
    c.line(x0, y, x1, y, "#e4e4e4", 1);
    c.text(x0 - 7, y + 3.5, fmt6(t), 10, "end");
  }
  for (double t : xticks) {
    double x = sx(t);
    c.line(x, y1, x, y1 + 4, "#404040", 1);
    c.text(x, y1 + 16, fmt6(t), 10, "middle");
  }
  c.line(x0, y0, x0, y1, "#404040", 1);
  c.line(x0, y1, x1, y1, "#404040", 1);
}

void line_figure(Emitter& out, int fig_number, const std::string& title, const Grid& g) {
  const double width = 960;
  const double height = 500;
  const double x0 = 62;
  const double x1 = 706;
  const double y0 = 40;
  const double y1 = 452;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : g.values.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double pad = lo == hi ? 0.5 : (hi - lo) * 0.04;

  Canvas c(width, height);
  c.rect(0, 0, width, height, "#ffffff");
  c.text(14, 24, title + " (" + g.dates.front().iso() + " to " + g.dates.back().iso() + ")", 14,
         "start", "#202020", true);

  LinScale sx{1, static_cast<double>(g.dates.size()), x0, x1};
  LinScale sy{lo - pad, hi + pad, y1, y0};
  std::vector<double> xticks;
  for (int w : week_ticks(g.dates.size(), 8)) xticks.push_back(w);
  draw_frame(c, x0, y0, x1, y1, sx, sy, xticks, svg::nice_ticks(lo - pad, hi + pad, 6));
  c.text((x0 + x1) / 2, y1 + 32, "week", 11, "middle");

  for (std::size_t i = 0; i < g.tickers.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < g.dates.size(); ++j)
      pts.emplace_back(sx(static_cast<double>(j + 1)), sy(g.values(i, j)));
    c.polyline(pts, kPalette[i % kPalette.size()], 1.4);
  }

  // Legend: up to three columns of ten entries.
  const double lx = 730;
  for (std::size_t i = 0; i < g.tickers.size(); ++i) {
    double col = static_cast<double>(i / 10);
    double row = static_cast<double>(i % 10);
    double x = lx + col * 76;
    double y = 56 + row * 18;
    c.rect(x, y - 9, 10, 10, kPalette[i % kPalette.size()]);
    c.text(x + 15, y, g.tickers[i], 10);
  }

  std::ostringstream csv;
  csv << "date";
  for (const auto& t : g.tickers) csv << "," << t;
  csv << "\n";
  for (std::size_t j = 0; j < g.dates.size(); ++j) {
    csv << g.dates[j].iso();
    for (std::size_t i = 0; i < g.tickers.size(); ++i) csv << "," << fmt6(g.values(i, j));
    csv << "\n";
  }

  std::string base = "fig" + std::to_string(fig_number);
  out.write(base + ".svg", c.finish());
  out.write(base + ".csv", csv.str());
}

/// Numeric attributes in canonical column order, with blank optionals left
/// out of their column's values.
std::vector<std::pair<std::string, Series>> numeric_columns(const Dataset& d) {
  std::vector<std::pair<std::string, Series>> cols;
  auto add = [&](const std::string& name, auto getter) {
    Series v;
    v.reserve(d.records.size());
    for (const auto& rec : d.records) getter(rec, v);
    cols.emplace_back(name, std::move(v));
  };
  using R = ingest::WeeklyRecord;
  add("quarter", [](const R& r, Series& v) { v.push_back(r.quarter); });
  add("open", [](const R& r, Series& v) { v.push_back(r.open); });
  add("high", [](const R& r, Series& v) { v.push_back(r.high); });
  add("low", [](const R& r, Series& v) { v.push_back(r.low); });
  add("close", [](const R& r, Series& v) { v.push_back(r.close); });
  add("volume", [](const R& r, Series& v) { v.push_back(static_cast<double>(r.volume)); });
  add("percent_change_price",
      [](const R& r, Series& v) { v.push_back(r.percent_change_price); });
  add("percent_change_volume_over_last_wk", [](const R& r, Series& v) {
    if (r.percent_change_volume_over_last_wk) v.push_back(*r.percent_change_volume_over_last_wk);
  });
  add("previous_weeks_volume", [](const R& r, Series& v) {
    if (r.previous_weeks_volume) v.push_back(static_cast<double>(*r.previous_weeks_volume));
  });
  add("next_weeks_open", [](const R& r, Series& v) { v.push_back(r.next_weeks_open); });
  add("next_weeks_close", [](const R& r, Series& v) { v.push_back(r.next_weeks_close); });
  add("percent_change_next_weeks_price",
      [](const R& r, Series& v) { v.push_back(r.percent_change_next_weeks_price); });
  add("days_to_next_dividend",
      [](const R& r, Series& v) { v.push_back(static_cast<double>(r.days_to_next_dividend)); });
  add("percent_return_next_dividend",
      [](const R& r, Series& v) { v.push_back(r.percent_return_next_dividend); });
  return cols;
}

}  // namespace

void fig_close_prices(Emitter& out, const Dataset& d) {
  line_figure(out, 1, "weekly closing price by stock", pivot_close(d, false));
}

void fig_log_prices(Emitter& out, const Dataset& d) {
  line_figure(out, 3, "log weekly closing price by stock", pivot_close(d, true));
}

void fig_histograms(Emitter& out, const Dataset& d) {
  auto cols = numeric_columns(d);
  const std::size_t ncols = 4;
  const double cell_w = 250;
  const double cell_h = 150;
  const std::size_t nrows = (cols.size() + ncols - 1) / ncols;
  const double width = 40 + cell_w * ncols;
  const double height = 44 + cell_h * static_cast<double>(nrows);

  Canvas c(width, height);
  c.rect(0, 0, width, height, "#ffffff");
  c.text(14, 24, "attribute distributions (10 equal-width bins)", 14, "start", "#202020", true);

  std::ostringstream csv;
  csv << "column,bin_lo,bin_hi,count\n";

  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto& [name, values] = cols[i];
    if (values.empty()) continue;
    auto bins = features::histogram(values, 10);
    for (const auto& b : bins)
      csv << name << "," << fmt6(b.lo) << "," << fmt6(b.hi) << "," << b.count << "\n";

    double ox = 20 + cell_w * static_cast<double>(i % ncols);
    double oy = 40 + cell_h * static_cast<double>(i / ncols);
    c.text(ox + 6, oy + 14, name, 10, "start", "#202020", true);

    std::size_t max_count = 0;
    for (const auto& b : bins) max_count = std::max(max_count, b.count);
    const double bx0 = ox + 6;
    const double bw = (cell_w - 24) / static_cast<double>(bins.size());
    const double base = oy + 118;
    const double bh_max = 86;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      double h = max_count == 0
                     ? 0
                     : bh_max * static_cast<double>(bins[b].count) / static_cast<double>(max_count);
      c.rect(bx0 + bw * static_cast<double>(b) + 1, base - h, bw - 2, h, "#4878b0");
    }
    c.line(bx0, base, bx0 + bw * static_cast<double>(bins.size()), base, "#404040", 1);
    c.text(bx0, base + 12, fmt6(bins.front().lo), 9);
    c.text(bx0 + bw * static_cast<double>(bins.size()), base + 12, fmt6(bins.back().hi), 9,
           "end");
    c.text(ox + cell_w - 18, oy + 14, "max " + std::to_string(max_count), 9, "end", "#707070");
  }

  out.write("fig2.svg", c.finish());
  out.write("fig2.csv", csv.str());
}

void fig_elbow(Emitter& out, const std::vector<std::pair<int, double>>& curve) {
  const double width = 640;
  const double height = 440;
  const double x0 = 74;
  const double x1 = 612;
  const double y0 = 40;
  const double y1 = 392;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [k, w] : curve) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  double pad = lo == hi ? 0.5 : (hi - lo) * 0.05;

  Canvas c(width, height);
  c.rect(0, 0, width, height, "#ffffff");
  c.text(14, 24, "elbow curve: within-cluster sum of squares by k", 14, "start", "#202020", true);

  LinScale sx{static_cast<double>(curve.front().first), static_cast<double>(curve.back().first),
              x0, x1};
  LinScale sy{lo - pad, hi + pad, y1, y0};
  std::vector<double> xticks;
  for (const auto& [k, w] : curve) xticks.push_back(k);
  draw_frame(c, x0, y0, x1, y1, sx, sy, xticks, svg::nice_ticks(lo - pad, hi + pad, 6));
  c.text((x0 + x1) / 2, y1 + 32, "k", 11, "middle");

  std::vector<std::pair<double, double>> pts;
  for (const auto& [k, w] : curve) pts.emplace_back(sx(k), sy(w));
  c.polyline(pts, "#2f6db0", 2);
  for (const auto& [x, y] : pts) c.circle(x, y, 3.5, "#2f6db0");

  std::ostringstream csv;
  csv << "k,wcss\n";
  for (const auto& [k, w] : curve) csv << k << "," << fmt6(w) << "\n";

  out.write("fig4.svg", c.finish());
  out.write("fig4.csv", csv.str());
}

void fig_accuracy_bars(Emitter& out, const eval::ModelScore& score, int fig_number) {
  const double width = 520;
  const double height = 420;
  const double x0 = 70;
  const double x1 = 496;
  const double y0 = 48;
  const double y1 = 356;

  double lo = std::min({0.0, score.test_accuracy, score.reference_accuracy});
  double hi = std::max({0.0, score.test_accuracy, score.reference_accuracy});
  double pad = (hi - lo) * 0.08 + 1;

  std::string pretty = score.name;
  std::replace(pretty.begin(), pretty.end(), '_', ' ');

  Canvas c(width, height);
  c.rect(0, 0, width, height, "#ffffff");
  c.text(14, 24, pretty + ": obtained vs reference accuracy", 14, "start", "#202020", true);

  LinScale sy{lo - pad, hi + pad, y1, y0};
  auto yticks = svg::nice_ticks(lo - pad, hi + pad, 6);
  for (double t : yticks) {
    c.line(x0, sy(t), x1, sy(t), "#e4e4e4", 1);
    c.text(x0 - 7, sy(t) + 3.5, fmt6(t), 10, "end");
  }
  c.line(x0, y0, x0, y1, "#404040", 1);

  struct Bar {
    const char* label;
    double value;
    const char* color;
  };
  const Bar bars[2] = {{"obtained", score.test_accuracy, "#2f6db0"},
                       {"reference", score.reference_accuracy, "#9aa0a6"}};
  double zero = sy(0);
  const double bar_w = 110;
  for (int i = 0; i < 2; ++i) {
    double cx = x0 + (x1 - x0) * (i == 0 ? 0.3 : 0.7);
    double top = sy(bars[i].value);
    double y = std::min(top, zero);
    double h = std::abs(top - zero);
    c.rect(cx - bar_w / 2, y, bar_w, h, bars[i].color);
    c.text(cx, bars[i].value >= 0 ? top - 7 : top + 15, fmt6(bars[i].value), 11, "middle",
           "#202020", true);
    c.text(cx, y1 + 20, bars[i].label, 11, "middle");
  }
  c.line(x0, zero, x1, zero, "#404040", 1);
  c.text((x0 + x1) / 2, y1 + 44, "accuracy = 100 * R^2 on held-out rows; reference is context",
         10, "middle", "#707070");

  std::ostringstream csv;
  csv << "model,series,accuracy\n";
  csv << score.name << ",obtained," << fmt6(score.test_accuracy) << "\n";
  csv << score.name << ",reference," << fmt6(score.reference_accuracy) << "\n";

  std::string base = "fig" + std::to_string(fig_number);
  out.write(base + ".svg", c.finish());
  out.write(base + ".csv", csv.str());
}

void write_accuracy_csv(Emitter& out, const std::vector<eval::ModelScore>& scores) {
  std::ostringstream csv;
  csv << "model,accuracy,reference\n";
  for (const auto& s : scores)
    csv << s.name << "," << fmt6(s.test_accuracy) << "," << fmt6(s.reference_accuracy) << "\n";
  out.write("accuracy.csv", csv.str());
}

void write_cluster_files(Emitter& out, const cluster::ClusterModel& m,
                         const std::vector<std::string>& members) {
  std::ostringstream csv;
  csv << "ticker,cluster\n";
  for (const auto& [ticker, c] : m.assignments) csv << ticker << "," << c << "\n";
  out.write("cluster_assignments.csv", csv.str());

  std::string txt;
  for (const auto& t : members) txt += t + "\n";
  out.write("cluster_members.txt", txt);
}

void write_predictions(Emitter& out, const std::string& model_name,
                       const eval::PipelineResult& r, const Series& predicted) {
  std::ostringstream csv;
  csv << "week,date,actual,predicted\n";
  for (std::size_t i = 0; i < r.split.test.size(); ++i) {
    std::size_t row = r.split.test[i];
    std::size_t w = r.design.week_index[row];
    csv << (w + 1) << "," << r.returns.dates[w].iso() << "," << fmt6(r.y_test[i]) << ","
        << fmt6(predicted[i]) << "\n";
  }
  out.write("predictions_" + model_name + ".csv", csv.str());
}

void write_models(Emitter& out, const eval::PipelineResult& r) {
  out.write("model_linear.txt", models::serialize_model(r.linear));
  out.write("model_forest.txt", models::serialize_model(r.forest));
  out.write("model_boost.txt", models::serialize_model(r.boost));
}

}  // namespace dowlab::figures
