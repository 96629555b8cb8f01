#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "dowlab/features.hpp"
#include "dowlab/matrix.hpp"

namespace dowlab::models {

using features::FactorSeries;
using features::ReturnMatrix;

/// Least-squares fit: intercept plus one coefficient per design column.
struct LinearModel {
  double intercept = 0;
  Series coefficients;
  std::vector<std::string> names;  // one per coefficient
  double residual_variance = 0;    // SSE / (n - p - 1)

  bool operator==(const LinearModel&) const = default;
};

/// Index-linked binary tree node. feature == -1 marks a leaf whose value is
/// the mean of the training targets that reached it.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;
  int count = 0;

  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int max_depth = 0;
  int min_leaf = 0;

  double predict_row(std::span<const double> x) const;

  bool operator==(const RegressionTree&) const = default;
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  int tree_count = 0;
  int mtry = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int max_depth = 0;
  int min_leaf = 0;
  std::size_t n_features = 0;

  bool operator==(const ForestModel&) const = default;
};

struct BoostModel {
  double initial = 0;  // training-target mean
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  int stages = 0;
  std::uint64_t seed = 0;
  int max_depth = 0;
  int min_leaf = 0;
  std::size_t n_features = 0;
  Series sse_trace;  // training SSE after the base model and after each stage

  bool operator==(const BoostModel&) const = default;
};

using FittedModel = std::variant<LinearModel, ForestModel, BoostModel>;

/// Least-squares coefficients via Householder QR (no explicit inversion).
/// Residuals come out orthogonal to every column and the intercept.
/// Throws RankDeficient naming the first (near-)dependent column, TooFewRows
/// unless rows > cols + 1.
LinearModel fit_ols(const Matrix& x, const Series& y,
                    const std::vector<std::string>& names = {});

struct FactorRegression {
  LinearModel model;  // intercept is alpha; coefficients follow model.names
  bool hml_dropped = false;  // true when the HML series was all zero

  bool operator==(const FactorRegression&) const = default;
};

/// Regresses the ticker's excess return on [mkt - risk_free, smb, hml] with
/// an intercept. An all-zero HML series drops that column; its loading is
/// then undefined-by-zero-factor rather than spuriously zero.
FactorRegression fit_fama_french(const ReturnMatrix& r, const FactorSeries& f,
                                 const std::string& ticker);

/// Greedy CART regression tree. At each node, `mtry` features are sampled
/// without replacement from rng (mtry == all features consumes no randomness
/// and scans in index order); candidate thresholds are midpoints between
/// consecutive distinct sorted values; the split maximizing the SSE reduction
/// wins, ties breaking by lowest feature index then lowest threshold. Each
/// candidate's reduction is computed from its partition membership alone, so
/// two candidates that induce the same row split -- even through different
/// features -- tie bit-exactly rather than by rounding accident. Splits
/// leaving a child under min_leaf rows are skipped; a node stops at
/// max_depth, under 2*min_leaf rows, or when no split reduces the SSE.
RegressionTree fit_tree(const Matrix& x, const Series& y, int max_depth, int min_leaf, int mtry,
                        std::mt19937_64& rng);

/// Bagged forest of `tree_count` trees; tree b uses a generator derived
/// arithmetically from (seed, b), drawing its bootstrap resample before any
/// split sampling, so serial and parallel training agree exactly.
ForestModel fit_random_forest(const Matrix& x, const Series& y, int tree_count, int max_depth,
                              int min_leaf, int mtry, bool bootstrap, std::uint64_t seed);

/// Stage-wise squared-error boosting: start from the target mean, then each
/// stage fits a full-data tree to the current residuals and adds it scaled by
/// the constant learning rate. Training SSE is recorded per stage and is
/// non-increasing.
BoostModel fit_gradient_boost(const Matrix& x, const Series& y, int stages, double learning_rate,
                              int max_depth, int min_leaf, std::uint64_t seed);

Series predict(const LinearModel& m, const Matrix& x);
Series predict(const RegressionTree& t, const Matrix& x);
Series predict(const ForestModel& m, const Matrix& x);
Series predict(const BoostModel& m, const Matrix& x);
Series predict(const FittedModel& m, const Matrix& x);

/// Versioned, self-describing text serialization; doubles are written with
/// 17 significant digits so a round trip is lossless.
std::string serialize_model(const FittedModel& m);
FittedModel deserialize_model(const std::string& text);
void save_model(const FittedModel& m, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace dowlab::models
