#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dowlab/clustering.hpp"
#include "dowlab/features.hpp"
#include "dowlab/ingest.hpp"
#include "dowlab/matrix.hpp"
#include "dowlab/models.hpp"

namespace dowlab::eval {

enum class SplitScheme { Temporal, Holdout };

struct SplitSpec {
  SplitScheme scheme = SplitScheme::Temporal;
  double fraction = 0.25;  // test share, holdout only

  /// Accepts "temporal" or "holdout:<fraction>" with fraction in (0, 1).
  static SplitSpec parse(const std::string& text);
  std::string to_string() const;

  bool operator==(const SplitSpec&) const = default;
};

struct SplitResult {
  std::vector<std::size_t> train;  // sorted row indices
  std::vector<std::size_t> test;
};

/// Temporal: quarter-1 rows train, quarter-2 rows test (the seed is unused).
/// Holdout: a seeded shuffle takes round(fraction * n) rows for test.
/// Either side ending up empty throws DegenerateSplit.
SplitResult split(std::size_t n_rows, const std::vector<int>& quarters, const SplitSpec& spec,
                  std::uint64_t seed);

/// Coefficient of determination, 1 - SSE/SST. Unbounded below on held-out
/// data; throws ZeroVariance when the actuals are all equal.
double r_squared(const Series& actual, const Series& predicted);

/// The comparison metric: 100 * r_squared.
double accuracy(const Series& actual, const Series& predicted);

struct ResidualSummary {
  double mean = 0;
  double sd = 0;  // sample standard deviation; 0 for a single residual
  double min = 0;
  double max = 0;
};

ResidualSummary summarize_residuals(const Series& actual, const Series& predicted);

struct ModelScore {
  std::string name;
  double train_accuracy = 0;
  double test_accuracy = 0;
  double reference_accuracy = 0;  // previously reported result, not a target
  ResidualSummary residuals;      // held-out residuals
};

struct EvaluationReport {
  std::string target;
  std::string split_description;
  std::uint64_t seed = 0;
  int k = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;

  std::vector<std::string> members;  // the target's co-movement cluster
  double cluster_wcss = 0;
  int cluster_iterations = 0;

  double alpha = 0;  // factor-regression intercept
  std::vector<std::pair<std::string, double>> factor_loadings;
  bool hml_dropped = false;

  std::vector<ModelScore> scores;    // fixed order: linear, forest, boosting
  std::vector<std::string> ranking;  // model names by test accuracy, best first

  std::string to_text() const;
  std::string to_kv() const;
};

struct PipelineOptions {
  std::uint64_t seed = 42;
  std::string target = "DIS";
  int k = 3;
  int elbow_k_max = 10;
  int kmeans_restarts = 10;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
  int forest_trees = 100;
  int forest_depth = 6;
  int boost_stages = 100;
  int boost_depth = 3;
  int min_leaf = 2;
  double learning_rate = 0.1;
  SplitSpec split;
  features::FactorOptions factors;
};

/// Everything one full run produces, kept for reports and figures.
struct PipelineResult {
  features::ReturnMatrix returns;
  features::MarketValueTable market_values;
  features::FactorSeries factors;
  cluster::ClusterModel clusters;
  std::vector<std::pair<int, double>> elbow;
  std::vector<std::string> members;
  models::FactorRegression factor_fit;
  features::DesignMatrix design;
  SplitResult split;
  models::LinearModel linear;
  models::ForestModel forest;
  models::BoostModel boost;
  Series y_test;
  Series linear_test_pred;
  Series forest_test_pred;
  Series boost_test_pred;
  EvaluationReport report;
  std::vector<std::string> warnings;
};

/// Runs the full sequence: factors, clustering, elbow curve, the target's
/// co-movement feature, factor regression, train/test split, the three
/// models, and the comparison report. Deterministic for a given
/// (dataset, options) pair; every random stage draws a sub-seed derived from
/// options.seed.
PipelineResult run_pipeline(const ingest::Dataset& d, const PipelineOptions& opts);

}  // namespace dowlab::eval
