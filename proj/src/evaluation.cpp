#include "dowlab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

#include "dowlab/errors.hpp"
#include "dowlab/rng.hpp"
#include "dowlab/text.hpp"

namespace dowlab::eval {

SplitSpec SplitSpec::parse(const std::string& text) {
  if (text == "temporal") return {SplitScheme::Temporal, 0.25};
  if (text.rfind("holdout:", 0) == 0) {
    std::string num = text.substr(8);
    const char* begin = num.c_str();
    char* end = nullptr;
    double f = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !(f > 0) || !(f < 1))
      throw ConfigError("holdout fraction must be a number in (0, 1), got '" + num + "'");
    return {SplitScheme::Holdout, f};
  }
  throw ConfigError("split must be 'temporal' or 'holdout:<fraction>', got '" + text + "'");
}

std::string SplitSpec::to_string() const {
  if (scheme == SplitScheme::Temporal) return "temporal";
  return "holdout:" + fmt6(fraction);
}

SplitResult split(std::size_t n_rows, const std::vector<int>& quarters, const SplitSpec& spec,
                  std::uint64_t seed) {
  if (n_rows == 0) throw DegenerateSplit("no rows to split");
  SplitResult res;
  if (spec.scheme == SplitScheme::Temporal) {
    if (quarters.size() != n_rows)
      throw DimensionMismatch("got " + std::to_string(quarters.size()) + " quarters for " +
                              std::to_string(n_rows) + " rows");
    for (std::size_t i = 0; i < n_rows; ++i)
      (quarters[i] == 1 ? res.train : res.test).push_back(i);
    if (res.train.empty() || res.test.empty())
      throw DegenerateSplit("temporal split needs rows in both quarters");
    return res;
  }

  auto test_count = static_cast<std::size_t>(
      std::llround(spec.fraction * static_cast<double>(n_rows)));
  if (test_count == 0 || test_count >= n_rows)
    throw DegenerateSplit("holdout fraction " + fmt6(spec.fraction) + " leaves " +
                          std::to_string(test_count) + " of " + std::to_string(n_rows) +
                          " rows for testing");

  std::vector<std::size_t> idx(n_rows);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i + 1 < n_rows; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_rows - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  res.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(test_count));
  res.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(test_count), idx.end());
  std::sort(res.test.begin(), res.test.end());
  std::sort(res.train.begin(), res.train.end());
  return res;
}

double r_squared(const Series& actual, const Series& predicted) {
  if (actual.empty()) throw EmptySeries();
  if (actual.size() != predicted.size())
    throw DimensionMismatch("got " + std::to_string(predicted.size()) + " predictions for " +
                            std::to_string(actual.size()) + " actuals");
  double mean = 0;
  for (double v : actual) mean += v;
  mean /= static_cast<double>(actual.size());
  double sst = 0;
  double sse = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    sst += (actual[i] - mean) * (actual[i] - mean);
    sse += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }
  if (sst == 0) throw ZeroVariance();
  return 1 - sse / sst;
}

double accuracy(const Series& actual, const Series& predicted) {
  return 100 * r_squared(actual, predicted);
}

ResidualSummary summarize_residuals(const Series& actual, const Series& predicted) {
  if (actual.empty()) throw EmptySeries();
  if (actual.size() != predicted.size())
    throw DimensionMismatch("got " + std::to_string(predicted.size()) + " predictions for " +
                            std::to_string(actual.size()) + " actuals");
  Series r(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) r[i] = actual[i] - predicted[i];

  ResidualSummary s;
  s.min = *std::min_element(r.begin(), r.end());
  s.max = *std::max_element(r.begin(), r.end());
  for (double v : r) s.mean += v;
  s.mean /= static_cast<double>(r.size());
  if (r.size() > 1) {
    double acc = 0;
    for (double v : r) acc += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(r.size() - 1));
  }
  return s;
}

namespace {

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  out << "model comparison for " << target << "\n";
  out << "split: " << split_description << " (" << train_rows << " train rows, " << test_rows
      << " test rows)\n";
  out << "seed: " << seed << "\n";
  out << "accuracy = 100 * R^2 of predicted vs actual next-week price change on held-out rows\n";
  out << "reference = previously reported accuracy on this dataset; context, not a target\n";
  out << "\n";

  out << "co-movement cluster of " << target << " (k=" << k << ", wcss " << fmt6(cluster_wcss)
      << ", " << cluster_iterations << " iterations): " << join(members, " ") << "\n";
  out << "factor fit for " << target << ": alpha=" << fmt6(alpha);
  for (const auto& [name, value] : factor_loadings) out << " " << name << "=" << fmt6(value);
  if (hml_dropped) out << " (hml dropped: series is all zero)";
  out << "\n\n";

  out << pad("model", 20) << pad("train accuracy", 16) << pad("test accuracy", 16) << "reference"
      << "\n";
  for (const ModelScore& s : scores) {
    out << pad(s.name, 20) << pad(fmt6(s.train_accuracy), 16) << pad(fmt6(s.test_accuracy), 16)
        << fmt6(s.reference_accuracy) << "\n";
  }
  out << "\n";

  out << "held-out residuals (actual - predicted)\n";
  out << pad("model", 20) << pad("mean", 12) << pad("sd", 12) << pad("min", 12) << "max"
      << "\n";
  for (const ModelScore& s : scores) {
    out << pad(s.name, 20) << pad(fmt6(s.residuals.mean), 12) << pad(fmt6(s.residuals.sd), 12)
        << pad(fmt6(s.residuals.min), 12) << fmt6(s.residuals.max) << "\n";
  }
  out << "\n";
  out << "ranking by test accuracy: " << join(ranking, " > ") << "\n";
  return out.str();
}

std::string EvaluationReport::to_kv() const {
  std::ostringstream out;
  out << "target=" << target << "\n";
  out << "split=" << split_description << "\n";
  out << "seed=" << seed << "\n";
  out << "k=" << k << "\n";
  out << "train_rows=" << train_rows << "\n";
  out << "test_rows=" << test_rows << "\n";
  out << "cluster_wcss=" << fmt6(cluster_wcss) << "\n";
  out << "cluster_iterations=" << cluster_iterations << "\n";
  out << "members=" << join(members, ",") << "\n";
  out << "alpha=" << fmt6(alpha) << "\n";
  for (const auto& [name, value] : factor_loadings)
    out << "loading." << name << "=" << fmt6(value) << "\n";
  out << "hml_dropped=" << (hml_dropped ? 1 : 0) << "\n";
  out << "accuracy_definition=100*R2(test)\n";
  for (const ModelScore& s : scores) {
    out << "model." << s.name << ".train_accuracy=" << fmt6(s.train_accuracy) << "\n";
    out << "model." << s.name << ".test_accuracy=" << fmt6(s.test_accuracy) << "\n";
    out << "model." << s.name << ".reference=" << fmt6(s.reference_accuracy) << "\n";
    out << "model." << s.name << ".residual_mean=" << fmt6(s.residuals.mean) << "\n";
    out << "model." << s.name << ".residual_sd=" << fmt6(s.residuals.sd) << "\n";
    out << "model." << s.name << ".residual_min=" << fmt6(s.residuals.min) << "\n";
    out << "model." << s.name << ".residual_max=" << fmt6(s.residuals.max) << "\n";
  }
  out << "ranking=" << join(ranking, ">") << "\n";
  return out.str();
}

PipelineResult run_pipeline(const ingest::Dataset& d, const PipelineOptions& opts) {
  PipelineResult res;
  res.returns = features::pivot_returns(d);
  res.market_values = features::market_values(d);
  res.factors = features::build_factors(d, res.returns, res.market_values, opts.factors);

  // Sub-seed streams: 1 clustering, 2 elbow curve, 3 holdout split,
  // 16 forest, 17 boosting. Linear fits draw no randomness.
  res.clusters =
      cluster::kmeans_best(res.returns, opts.k, derive_seed(opts.seed, 1), opts.kmeans_restarts,
                           opts.kmeans_max_iter, opts.kmeans_tol);
  int elbow_k_max = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(std::max(opts.elbow_k_max, 1)), res.returns.values.rows()));
  res.elbow = cluster::elbow_curve(res.returns, elbow_k_max, derive_seed(opts.seed, 2),
                                   opts.kmeans_restarts, opts.kmeans_max_iter, opts.kmeans_tol);
  res.members = cluster::cluster_members(res.clusters, opts.target);
  Series comovement =
      cluster::cluster_feature(res.returns, res.members, opts.target, &res.warnings);

  res.factor_fit = models::fit_fama_french(res.returns, res.factors, opts.target);

  // Row r of the design is the target's r-th week. The split is decided
  // before the design is built so volume standardization sees training rows
  // only.
  std::vector<int> quarters;
  for (const auto& rec : d.records) {
    if (rec.stock == opts.target) quarters.push_back(rec.quarter);
  }
  if (quarters.empty()) throw UnknownTicker(opts.target);
  res.split = split(quarters.size(), quarters, opts.split, derive_seed(opts.seed, 3));

  res.design = features::build_design_matrix(d, res.returns, res.factors, comovement, opts.target,
                                             res.split.train);

  auto take = [&](const std::vector<std::size_t>& rows) {
    std::pair<Matrix, Series> out{Matrix(rows.size(), res.design.x.cols()), Series(rows.size())};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto src = res.design.x.row(rows[i]);
      std::copy(src.begin(), src.end(), out.first.row(i).begin());
      out.second[i] = res.design.y[rows[i]];
    }
    return out;
  };
  auto [x_train, y_train] = take(res.split.train);
  auto [x_test, y_test] = take(res.split.test);
  res.y_test = y_test;

  auto p = static_cast<int>(res.design.x.cols());
  int mtry = (p + 2) / 3;  // ceil(p / 3)
  res.linear = models::fit_ols(x_train, y_train, res.design.columns);
  res.forest =
      models::fit_random_forest(x_train, y_train, opts.forest_trees, opts.forest_depth,
                                opts.min_leaf, mtry, true, derive_seed(opts.seed, 16));
  res.boost = models::fit_gradient_boost(x_train, y_train, opts.boost_stages, opts.learning_rate,
                                         opts.boost_depth, opts.min_leaf, derive_seed(opts.seed, 17));

  res.linear_test_pred = models::predict(res.linear, x_test);
  res.forest_test_pred = models::predict(res.forest, x_test);
  res.boost_test_pred = models::predict(res.boost, x_test);

  EvaluationReport rep;
  rep.target = opts.target;
  rep.split_description = opts.split.to_string();
  rep.seed = opts.seed;
  rep.k = opts.k;
  rep.train_rows = res.split.train.size();
  rep.test_rows = res.split.test.size();
  rep.members = res.members;
  rep.cluster_wcss = res.clusters.wcss;
  rep.cluster_iterations = res.clusters.iterations;
  rep.alpha = res.factor_fit.model.intercept;
  for (std::size_t j = 0; j < res.factor_fit.model.coefficients.size(); ++j)
    rep.factor_loadings.emplace_back(res.factor_fit.model.names[j],
                                     res.factor_fit.model.coefficients[j]);
  rep.hml_dropped = res.factor_fit.hml_dropped;

  auto score = [&](const std::string& name, const Series& train_pred, const Series& test_pred,
                   double reference) {
    ModelScore s;
    s.name = name;
    s.train_accuracy = accuracy(y_train, train_pred);
    s.test_accuracy = accuracy(y_test, test_pred);
    s.reference_accuracy = reference;
    s.residuals = summarize_residuals(y_test, test_pred);
    return s;
  };
  rep.scores.push_back(
      score("linear_regression", models::predict(res.linear, x_train), res.linear_test_pred, 95.23));
  rep.scores.push_back(
      score("random_forest", models::predict(res.forest, x_train), res.forest_test_pred, 71.27));
  rep.scores.push_back(
      score("gradient_boosting", models::predict(res.boost, x_train), res.boost_test_pred, 92.97));

  std::vector<const ModelScore*> order;
  for (const ModelScore& s : rep.scores) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const ModelScore* a, const ModelScore* b) {
    return a->test_accuracy > b->test_accuracy;
  });
  for (const ModelScore* s : order) rep.ranking.push_back(s->name);

  res.report = std::move(rep);
  return res;
}

}  // namespace dowlab::eval
