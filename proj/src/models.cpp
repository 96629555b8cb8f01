#include "dowlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dowlab/errors.hpp"
#include "dowlab/rng.hpp"
#include "dowlab/text.hpp"

namespace dowlab::models {

namespace {

std::string column_label(std::size_t col, const std::vector<std::string>& names) {
  if (col == 0) return "intercept";
  if (names.empty()) return "x" + std::to_string(col - 1);
  return names[col - 1];
}

}  // namespace

LinearModel fit_ols(const Matrix& x, const Series& y, const std::vector<std::string>& names) {
  std::size_t n = x.rows();
  std::size_t p = x.cols();
  if (n == 0) throw EmptyMatrix();
  if (y.size() != n)
    throw DimensionMismatch("y has " + std::to_string(y.size()) + " entries for " +
                            std::to_string(n) + " rows");
  if (!names.empty() && names.size() != p)
    throw DimensionMismatch("got " + std::to_string(names.size()) + " names for " +
                            std::to_string(p) + " columns");
  if (n <= p + 1)
    throw TooFewRows("need more than " + std::to_string(p + 1) + " rows to fit " +
                     std::to_string(p) + " coefficients plus an intercept, got " +
                     std::to_string(n));

  // Augmented design: leading column of ones, then the predictors.
  std::size_t m = p + 1;
  Matrix a(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    a(r, 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) a(r, j + 1) = x(r, j);
  }
  Series b = y;

  double frob = 0;
  for (double v : a.data()) frob += v * v;
  frob = std::sqrt(frob);

  // Householder QR, applied to b as we go. Column k's remaining tail norm
  // collapsing (relative to the matrix scale) means the column is a linear
  // combination of its predecessors.
  std::vector<double> v(n);
  for (std::size_t k = 0; k < m; ++k) {
    double nrm = 0;
    for (std::size_t r = k; r < n; ++r) nrm += a(r, k) * a(r, k);
    nrm = std::sqrt(nrm);
    if (nrm <= 1e-10 * frob) throw RankDeficient(k, column_label(k, names));

    double alpha = a(k, k) > 0 ? -nrm : nrm;
    v[k] = a(k, k) - alpha;
    for (std::size_t r = k + 1; r < n; ++r) v[r] = a(r, k);
    double vtv = 0;
    for (std::size_t r = k; r < n; ++r) vtv += v[r] * v[r];

    a(k, k) = alpha;
    for (std::size_t r = k + 1; r < n; ++r) a(r, k) = 0;
    for (std::size_t j = k + 1; j < m; ++j) {
      double dot = 0;
      for (std::size_t r = k; r < n; ++r) dot += v[r] * a(r, j);
      double f = 2 * dot / vtv;
      for (std::size_t r = k; r < n; ++r) a(r, j) -= f * v[r];
    }
    double dot = 0;
    for (std::size_t r = k; r < n; ++r) dot += v[r] * b[r];
    double f = 2 * dot / vtv;
    for (std::size_t r = k; r < n; ++r) b[r] -= f * v[r];
  }

  // Back substitution on the triangular factor.
  Series beta(m);
  for (std::size_t k = m; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < m; ++j) s -= a(k, j) * beta[j];
    beta[k] = s / a(k, k);
  }

  // The rotated tail of b is exactly the residual vector's norm.
  double sse = 0;
  for (std::size_t r = m; r < n; ++r) sse += b[r] * b[r];

  LinearModel out;
  out.intercept = beta[0];
  out.coefficients.assign(beta.begin() + 1, beta.end());
  out.names = names;
  if (out.names.empty())
    for (std::size_t j = 0; j < p; ++j) out.names.push_back("x" + std::to_string(j));
  out.residual_variance = sse / static_cast<double>(n - m);
  return out;
}

FactorRegression fit_fama_french(const ReturnMatrix& r, const FactorSeries& f,
                                 const std::string& ticker) {
  std::size_t t = r.ticker_index(ticker);
  std::size_t w = r.dates.size();
  if (f.mkt.size() != w || f.smb.size() != w || f.hml.size() != w || f.risk_free.size() != w)
    throw DimensionMismatch("factor series do not share the return matrix date axis");

  bool hml_zero = std::all_of(f.hml.begin(), f.hml.end(), [](double h) { return h == 0.0; });
  std::vector<std::string> names = {"mkt", "smb"};
  if (!hml_zero) names.emplace_back("hml");

  Matrix x(w, names.size());
  Series y(w);
  for (std::size_t j = 0; j < w; ++j) {
    y[j] = r.values(t, j) - f.risk_free[j];
    x(j, 0) = f.mkt[j] - f.risk_free[j];
    x(j, 1) = f.smb[j];
    if (!hml_zero) x(j, 2) = f.hml[j];
  }

  FactorRegression out;
  out.hml_dropped = hml_zero;
  out.model = fit_ols(x, y, names);
  return out;
}

namespace {

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double reduction = 0;
};

/// Scan-order independent "better than" rule: larger reduction wins; exact
/// ties go to the lower feature index, then the lower threshold.
bool improves(const BestSplit& best, double reduction, int feature, double threshold) {
  if (!best.found) return true;
  if (reduction != best.reduction) return reduction > best.reduction;
  if (feature != best.feature) return feature < best.feature;
  return threshold < best.threshold;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Series& y, int max_depth, int min_leaf, int mtry,
              std::mt19937_64& rng)
      : x_(x), y_(y), max_depth_(max_depth), min_leaf_(min_leaf), mtry_(mtry), rng_(rng) {}

  int grow(std::vector<std::size_t> rows, int depth) {
    int idx = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[static_cast<std::size_t>(idx)].value = rows_mean(rows);
    nodes[static_cast<std::size_t>(idx)].count = static_cast<int>(rows.size());

    if (depth >= max_depth_ || rows.size() < 2 * static_cast<std::size_t>(min_leaf_)) return idx;

    BestSplit best = find_split(rows, rows_sse(rows));
    if (!best.found || best.reduction <= 0) return idx;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    int l = grow(std::move(left), depth + 1);
    int rgt = grow(std::move(right), depth + 1);
    TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rgt;
    return idx;
  }

  std::vector<TreeNode> nodes;

 private:
  std::vector<int> candidate_features() {
    auto p = static_cast<int>(x_.cols());
    std::vector<int> feats(static_cast<std::size_t>(p));
    std::iota(feats.begin(), feats.end(), 0);
    if (mtry_ >= p) return feats;  // full scan, no randomness consumed
    for (int i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                      feats.size() - 1);
      std::swap(feats[static_cast<std::size_t>(i)], feats[pick(rng_)]);
    }
    feats.resize(static_cast<std::size_t>(mtry_));
    std::sort(feats.begin(), feats.end());
    return feats;
  }

  double rows_mean(const std::vector<std::size_t>& rows) const {
    double sum = 0;
    for (std::size_t r : rows) sum += y_[r];
    return sum / static_cast<double>(rows.size());
  }

  /// Sum of squared deviations over the listed rows, two-pass in list order.
  /// The result depends only on which rows are listed, never on the feature
  /// that selected them, so candidates inducing the same partition get
  /// bit-identical reductions and the tie rule can actually fire.
  double rows_sse(const std::vector<std::size_t>& rows) const {
    double mean = rows_mean(rows);
    double sse = 0;
    for (std::size_t r : rows) sse += (y_[r] - mean) * (y_[r] - mean);
    return sse;
  }

  BestSplit find_split(const std::vector<std::size_t>& rows, double node_sse) {
    BestSplit best;
    std::size_t n = rows.size();
    std::vector<double> values(n);
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    left.reserve(n);
    right.reserve(n);
    for (int f : candidate_features()) {
      for (std::size_t i = 0; i < n; ++i) values[i] = x_(rows[i], static_cast<std::size_t>(f));
      std::sort(values.begin(), values.end());
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double lo = values[i];
        double hi = values[i + 1];
        if (lo == hi) continue;
        if (i + 1 < static_cast<std::size_t>(min_leaf_) ||
            n - i - 1 < static_cast<std::size_t>(min_leaf_))
          continue;
        // Midpoint, nudged down if rounding lands it on the upper value, so
        // "goes left iff value <= threshold" matches this index split.
        double thr = lo + (hi - lo) / 2;
        if (!(thr < hi)) thr = lo;
        left.clear();
        right.clear();
        for (std::size_t r : rows)
          (x_(r, static_cast<std::size_t>(f)) <= thr ? left : right).push_back(r);
        double reduction = node_sse - rows_sse(left) - rows_sse(right);
        if (improves(best, reduction, f, thr)) {
          best.found = true;
          best.feature = f;
          best.threshold = thr;
          best.reduction = reduction;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Series& y_;
  int max_depth_;
  int min_leaf_;
  int mtry_;
  std::mt19937_64& rng_;
};

}  // namespace

RegressionTree fit_tree(const Matrix& x, const Series& y, int max_depth, int min_leaf, int mtry,
                        std::mt19937_64& rng) {
  if (x.rows() == 0) throw EmptyMatrix();
  if (y.size() != x.rows())
    throw DimensionMismatch("y has " + std::to_string(y.size()) + " entries for " +
                            std::to_string(x.rows()) + " rows");
  if (max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (min_leaf < 1) throw ConfigError("min_leaf must be at least 1");
  if (mtry < 1) throw ConfigError("mtry must be at least 1");
  if (x.rows() < 2 * static_cast<std::size_t>(min_leaf))
    throw TooFewRows("growing a tree with min_leaf " + std::to_string(min_leaf) +
                     " needs at least " + std::to_string(2 * min_leaf) + " rows, got " +
                     std::to_string(x.rows()));

  TreeBuilder builder(x, y, max_depth, min_leaf, mtry, rng);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  builder.grow(std::move(rows), 0);

  RegressionTree t;
  t.nodes = std::move(builder.nodes);
  t.max_depth = max_depth;
  t.min_leaf = min_leaf;
  return t;
}

double RegressionTree::predict_row(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    auto f = static_cast<std::size_t>(nodes[i].feature);
    if (f >= x.size()) throw DimensionMismatch("row is too short for this tree");
    i = static_cast<std::size_t>(x[f] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
  }
  return nodes[i].value;
}

ForestModel fit_random_forest(const Matrix& x, const Series& y, int tree_count, int max_depth,
                              int min_leaf, int mtry, bool bootstrap, std::uint64_t seed) {
  if (x.rows() == 0) throw EmptyMatrix();
  if (y.size() != x.rows())
    throw DimensionMismatch("y has " + std::to_string(y.size()) + " entries for " +
                            std::to_string(x.rows()) + " rows");
  if (tree_count < 1) throw ConfigError("tree count must be at least 1");

  ForestModel m;
  m.tree_count = tree_count;
  m.mtry = mtry;
  m.bootstrap = bootstrap;
  m.seed = seed;
  m.max_depth = max_depth;
  m.min_leaf = min_leaf;
  m.n_features = x.cols();

  std::size_t n = x.rows();
  for (int b = 0; b < tree_count; ++b) {
    // A per-tree generator seeded arithmetically from (seed, b): trees are
    // independent of training order. The bootstrap draws come before any
    // feature sampling inside the tree.
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    if (bootstrap) {
      Matrix xb(n, x.cols());
      Series yb(n);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t src = pick(rng);
        auto row = x.row(src);
        std::copy(row.begin(), row.end(), xb.row(i).begin());
        yb[i] = y[src];
      }
      m.trees.push_back(fit_tree(xb, yb, max_depth, min_leaf, mtry, rng));
    } else {
      m.trees.push_back(fit_tree(x, y, max_depth, min_leaf, mtry, rng));
    }
  }
  return m;
}

BoostModel fit_gradient_boost(const Matrix& x, const Series& y, int stages, double learning_rate,
                              int max_depth, int min_leaf, std::uint64_t seed) {
  if (x.rows() == 0) throw EmptyMatrix();
  if (y.size() != x.rows())
    throw DimensionMismatch("y has " + std::to_string(y.size()) + " entries for " +
                            std::to_string(x.rows()) + " rows");
  if (stages < 0) throw ConfigError("stage count must be non-negative");
  if (!(learning_rate > 0) || learning_rate > 1)
    throw ConfigError("learning rate must be in (0, 1]");

  BoostModel m;
  m.learning_rate = learning_rate;
  m.stages = stages;
  m.seed = seed;
  m.max_depth = max_depth;
  m.min_leaf = min_leaf;
  m.n_features = x.cols();

  double s = 0;
  for (double v : y) s += v;
  m.initial = s / static_cast<double>(y.size());

  Series resid(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - m.initial;
  auto sse = [&] {
    double acc = 0;
    for (double r : resid) acc += r * r;
    return acc;
  };
  m.sse_trace.push_back(sse());

  // Every stage scans all features, so the generator is never drawn from;
  // the seed is kept only so the fit is fully described by its record.
  std::mt19937_64 rng(derive_seed(seed, 0));
  for (int k = 0; k < stages; ++k) {
    RegressionTree tree =
        fit_tree(x, resid, max_depth, min_leaf, static_cast<int>(x.cols()), rng);
    for (std::size_t i = 0; i < resid.size(); ++i)
      resid[i] -= learning_rate * tree.predict_row(x.row(i));
    m.sse_trace.push_back(sse());
    m.trees.push_back(std::move(tree));
  }
  return m;
}

Series predict(const LinearModel& m, const Matrix& x) {
  if (x.cols() != m.coefficients.size())
    throw DimensionMismatch("model has " + std::to_string(m.coefficients.size()) +
                            " coefficients for " + std::to_string(x.cols()) + " columns");
  Series out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double acc = m.intercept;
    for (std::size_t j = 0; j < x.cols(); ++j) acc += m.coefficients[j] * x(r, j);
    out[r] = acc;
  }
  return out;
}

Series predict(const RegressionTree& t, const Matrix& x) {
  Series out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = t.predict_row(x.row(r));
  return out;
}

Series predict(const ForestModel& m, const Matrix& x) {
  if (x.cols() != m.n_features)
    throw DimensionMismatch("forest was fit on " + std::to_string(m.n_features) +
                            " features, got " + std::to_string(x.cols()));
  if (m.trees.empty()) throw Error("forest has no trees");
  Series out(x.rows());
  std::vector<double> votes(m.trees.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t t = 0; t < m.trees.size(); ++t) votes[t] = m.trees[t].predict_row(x.row(r));
    // Summing in sorted order makes the mean independent of tree order.
    std::sort(votes.begin(), votes.end());
    double acc = 0;
    for (double v : votes) acc += v;
    out[r] = acc / static_cast<double>(votes.size());
  }
  return out;
}

Series predict(const BoostModel& m, const Matrix& x) {
  if (x.cols() != m.n_features)
    throw DimensionMismatch("model was fit on " + std::to_string(m.n_features) +
                            " features, got " + std::to_string(x.cols()));
  Series out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double acc = 0;
    for (const auto& t : m.trees) acc += t.predict_row(x.row(r));
    out[r] = m.initial + m.learning_rate * acc;
  }
  return out;
}

Series predict(const FittedModel& m, const Matrix& x) {
  return std::visit([&](const auto& concrete) { return predict(concrete, x); }, m);
}

namespace {

constexpr const char* kMagic = "dowlab_model";
constexpr int kVersion = 1;

void write_trees(std::ostringstream& out, const std::vector<RegressionTree>& trees) {
  for (std::size_t i = 0; i < trees.size(); ++i) {
    out << "tree " << i << " nodes " << trees[i].nodes.size() << "\n";
    for (const TreeNode& nd : trees[i].nodes) {
      out << nd.feature << " " << fmt_exact(nd.threshold) << " " << nd.left << " " << nd.right
          << " " << fmt_exact(nd.value) << " " << nd.count << "\n";
    }
  }
}

struct TokenReader {
  std::istringstream in;

  explicit TokenReader(const std::string& text) : in(text) {}

  [[noreturn]] void fail(const std::string& detail) { throw Error("model text: " + detail); }

  std::string word() {
    std::string tok;
    if (!(in >> tok)) fail("unexpected end of input");
    return tok;
  }
  void expect(const std::string& want) {
    std::string tok = word();
    if (tok != want) fail("expected '" + want + "', got '" + tok + "'");
  }
  double number() {
    double v = 0;
    if (!(in >> v)) fail("expected a number");
    return v;
  }
  long long integer() {
    long long v = 0;
    if (!(in >> v)) fail("expected an integer");
    return v;
  }
  std::uint64_t unsigned64() {
    std::uint64_t v = 0;
    if (!(in >> v)) fail("expected an unsigned integer");
    return v;
  }
};

std::vector<RegressionTree> read_trees(TokenReader& r, std::size_t count, int max_depth,
                                       int min_leaf) {
  std::vector<RegressionTree> trees(count);
  for (std::size_t i = 0; i < count; ++i) {
    r.expect("tree");
    if (static_cast<std::size_t>(r.integer()) != i) r.fail("trees are out of order");
    r.expect("nodes");
    auto node_count = static_cast<std::size_t>(r.integer());
    trees[i].max_depth = max_depth;
    trees[i].min_leaf = min_leaf;
    trees[i].nodes.resize(node_count);
    for (TreeNode& nd : trees[i].nodes) {
      nd.feature = static_cast<int>(r.integer());
      nd.threshold = r.number();
      nd.left = static_cast<int>(r.integer());
      nd.right = static_cast<int>(r.integer());
      nd.value = r.number();
      nd.count = static_cast<int>(r.integer());
    }
  }
  return trees;
}

}  // namespace

std::string serialize_model(const FittedModel& m) {
  std::ostringstream out;
  out << kMagic << " " << kVersion << "\n";
  if (const auto* lin = std::get_if<LinearModel>(&m)) {
    out << "kind linear\n";
    out << "intercept " << fmt_exact(lin->intercept) << "\n";
    out << "residual_variance " << fmt_exact(lin->residual_variance) << "\n";
    out << "coefficients " << lin->coefficients.size() << "\n";
    for (std::size_t j = 0; j < lin->coefficients.size(); ++j)
      out << lin->names[j] << " " << fmt_exact(lin->coefficients[j]) << "\n";
  } else if (const auto* rf = std::get_if<ForestModel>(&m)) {
    out << "kind forest\n";
    out << "tree_count " << rf->tree_count << "\n";
    out << "mtry " << rf->mtry << "\n";
    out << "bootstrap " << (rf->bootstrap ? 1 : 0) << "\n";
    out << "seed " << rf->seed << "\n";
    out << "max_depth " << rf->max_depth << "\n";
    out << "min_leaf " << rf->min_leaf << "\n";
    out << "n_features " << rf->n_features << "\n";
    write_trees(out, rf->trees);
  } else {
    const auto& gb = std::get<BoostModel>(m);
    out << "kind boost\n";
    out << "initial " << fmt_exact(gb.initial) << "\n";
    out << "learning_rate " << fmt_exact(gb.learning_rate) << "\n";
    out << "stages " << gb.stages << "\n";
    out << "seed " << gb.seed << "\n";
    out << "max_depth " << gb.max_depth << "\n";
    out << "min_leaf " << gb.min_leaf << "\n";
    out << "n_features " << gb.n_features << "\n";
    out << "sse_trace " << gb.sse_trace.size() << "\n";
    for (double v : gb.sse_trace) out << fmt_exact(v) << "\n";
    write_trees(out, gb.trees);
  }
  return out.str();
}

FittedModel deserialize_model(const std::string& text) {
  TokenReader r(text);
  r.expect(kMagic);
  if (r.integer() != kVersion) r.fail("unsupported version");
  r.expect("kind");
  std::string kind = r.word();

  if (kind == "linear") {
    LinearModel m;
    r.expect("intercept");
    m.intercept = r.number();
    r.expect("residual_variance");
    m.residual_variance = r.number();
    r.expect("coefficients");
    auto count = static_cast<std::size_t>(r.integer());
    for (std::size_t j = 0; j < count; ++j) {
      m.names.push_back(r.word());
      m.coefficients.push_back(r.number());
    }
    return m;
  }
  if (kind == "forest") {
    ForestModel m;
    r.expect("tree_count");
    m.tree_count = static_cast<int>(r.integer());
    r.expect("mtry");
    m.mtry = static_cast<int>(r.integer());
    r.expect("bootstrap");
    m.bootstrap = r.integer() != 0;
    r.expect("seed");
    m.seed = r.unsigned64();
    r.expect("max_depth");
    m.max_depth = static_cast<int>(r.integer());
    r.expect("min_leaf");
    m.min_leaf = static_cast<int>(r.integer());
    r.expect("n_features");
    m.n_features = static_cast<std::size_t>(r.integer());
    m.trees = read_trees(r, static_cast<std::size_t>(m.tree_count), m.max_depth, m.min_leaf);
    return m;
  }
  if (kind == "boost") {
    BoostModel m;
    r.expect("initial");
    m.initial = r.number();
    r.expect("learning_rate");
    m.learning_rate = r.number();
    r.expect("stages");
    m.stages = static_cast<int>(r.integer());
    r.expect("seed");
    m.seed = r.unsigned64();
    r.expect("max_depth");
    m.max_depth = static_cast<int>(r.integer());
    r.expect("min_leaf");
    m.min_leaf = static_cast<int>(r.integer());
    r.expect("n_features");
    m.n_features = static_cast<std::size_t>(r.integer());
    r.expect("sse_trace");
    auto count = static_cast<std::size_t>(r.integer());
    for (std::size_t i = 0; i < count; ++i) m.sse_trace.push_back(r.number());
    m.trees = read_trees(r, static_cast<std::size_t>(m.stages), m.max_depth, m.min_leaf);
    return m;
  }
  r.fail("unknown kind '" + kind + "'");
}

void save_model(const FittedModel& m, const std::string& path) {
  write_file(path, serialize_model(m));
}

FittedModel load_model(const std::string& path) { return deserialize_model(read_file(path)); }

}  // namespace dowlab::models
