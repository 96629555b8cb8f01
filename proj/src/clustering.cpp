#include "dowlab/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dowlab/errors.hpp"

namespace dowlab::cluster {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<int> assign_nearest(const Matrix& points, const Matrix& centroids) {
  std::vector<int> assignment(points.rows());
  for (std::size_t p = 0; p < points.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      double d = sq_dist(points.row(p), centroids.row(c));
      if (d < best) {  // strict: ties keep the lowest cluster index
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    assignment[p] = best_c;
  }
  return assignment;
}

double objective(const Matrix& points, const Matrix& centroids,
                 const std::vector<int>& assignment) {
  double acc = 0;
  for (std::size_t p = 0; p < points.rows(); ++p) {
    acc += sq_dist(points.row(p), centroids.row(static_cast<std::size_t>(assignment[p])));
  }
  return acc;
}

Matrix update_centroids(const Matrix& points, const std::vector<int>& assignment,
                        std::size_t k) {
  Matrix centroids(k, points.cols(), 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t p = 0; p < points.rows(); ++p) {
    auto c = static_cast<std::size_t>(assignment[p]);
    ++counts[c];
    for (std::size_t j = 0; j < points.cols(); ++j) centroids(c, j) += points(p, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < points.cols(); ++j)
      centroids(c, j) /= static_cast<double>(counts[c]);
  }
  // Reseed each emptied cluster with the point farthest from its assigned
  // centroid. The stolen point then sits at distance zero, so the objective
  // still cannot increase.
  std::vector<bool> taken(points.rows(), false);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    double far = -1;
    std::size_t far_p = 0;
    for (std::size_t p = 0; p < points.rows(); ++p) {
      if (taken[p]) continue;
      double d = sq_dist(points.row(p), centroids.row(static_cast<std::size_t>(assignment[p])));
      if (d > far) {
        far = d;
        far_p = p;
      }
    }
    taken[far_p] = true;
    for (std::size_t j = 0; j < points.cols(); ++j) centroids(c, j) = points(far_p, j);
  }
  return centroids;
}

Matrix seeded_initial_centroids(const Matrix& points, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(points.rows());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first k entries are k distinct data points.
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                    idx.size() - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[pick(rng)]);
  }
  Matrix centroids(static_cast<std::size_t>(k), points.cols());
  for (int c = 0; c < k; ++c) {
    auto src = points.row(idx[static_cast<std::size_t>(c)]);
    std::copy(src.begin(), src.end(), centroids.row(static_cast<std::size_t>(c)).begin());
  }
  return centroids;
}

ClusterModel wrap(const ReturnMatrix& r, int k, std::uint64_t seed, LloydResult&& res) {
  ClusterModel m;
  m.k = k;
  m.seed = seed;
  m.centroids = std::move(res.centroids);
  m.wcss = res.wcss;
  m.iterations = res.iterations;
  m.wcss_trace = std::move(res.wcss_trace);
  for (std::size_t i = 0; i < r.tickers.size(); ++i) m.assignments[r.tickers[i]] = res.assignment[i];
  return m;
}

void check_k(const Matrix& points, int k) {
  if (points.rows() == 0) throw EmptyMatrix();
  if (k < 1 || static_cast<std::size_t>(k) > points.rows())
    throw InvalidK("k must be in [1, " + std::to_string(points.rows()) + "], got " +
                   std::to_string(k));
}

}  // namespace

LloydResult lloyd(const Matrix& points, const Matrix& initial_centroids, int max_iter,
                  double tol) {
  check_k(points, static_cast<int>(initial_centroids.rows()));
  if (initial_centroids.cols() != points.cols())
    throw DimensionMismatch("centroid dimension does not match the points");

  LloydResult res;
  res.centroids = initial_centroids;
  res.assignment = assign_nearest(points, res.centroids);
  res.wcss = objective(points, res.centroids, res.assignment);
  res.wcss_trace.push_back(res.wcss);

  std::size_t k = res.centroids.rows();
  for (int it = 1; it <= max_iter; ++it) {
    res.centroids = update_centroids(points, res.assignment, k);
    auto next = assign_nearest(points, res.centroids);
    double w = objective(points, res.centroids, next);
    double prev = res.wcss_trace.back();
    if (w > prev + 1e-9 + 1e-12 * std::abs(prev))
      throw Error("objective increased during iteration " + std::to_string(it));
    res.wcss_trace.push_back(w);
    res.iterations = it;
    bool stable = next == res.assignment;
    res.assignment = std::move(next);
    res.wcss = w;
    if (stable) break;
    if (prev - w < tol) break;
  }
  return res;
}

ClusterModel kmeans(const ReturnMatrix& r, int k, std::uint64_t seed, int max_iter, double tol) {
  check_k(r.values, k);
  Matrix init = seeded_initial_centroids(r.values, k, seed);
  return wrap(r, k, seed, lloyd(r.values, init, max_iter, tol));
}

ClusterModel kmeans_best(const ReturnMatrix& r, int k, std::uint64_t seed, int restarts,
                         int max_iter, double tol) {
  if (restarts < 1) throw Error("restarts must be at least 1");
  check_k(r.values, k);
  ClusterModel best;
  for (int i = 0; i < restarts; ++i) {
    ClusterModel m = kmeans(r, k, seed + static_cast<std::uint64_t>(i), max_iter, tol);
    if (i == 0 || m.wcss < best.wcss) best = std::move(m);  // ties keep the lowest index
  }
  best.seed = seed;
  return best;
}

std::vector<std::pair<int, double>> elbow_curve(const ReturnMatrix& r, int k_max,
                                                std::uint64_t seed, int restarts, int max_iter,
                                                double tol) {
  check_k(r.values, k_max);
  if (restarts < 1) throw Error("restarts must be at least 1");

  std::vector<std::pair<int, double>> curve;
  Matrix prev_best_centroids;
  for (int k = 1; k <= k_max; ++k) {
    LloydResult best;
    bool have = false;
    for (int i = 0; i < restarts; ++i) {
      Matrix init = seeded_initial_centroids(r.values, k, seed + static_cast<std::uint64_t>(i));
      LloydResult res = lloyd(r.values, init, max_iter, tol);
      if (!have || res.wcss < best.wcss) {
        best = std::move(res);
        have = true;
      }
    }
    if (k > 1) {
      // Warm start: previous best centroids plus the point farthest from
      // them. Its initial objective is at most the previous best, so the
      // curve is non-increasing in k by construction.
      Matrix init(static_cast<std::size_t>(k), r.values.cols());
      for (std::size_t c = 0; c + 1 < static_cast<std::size_t>(k); ++c) {
        auto src = prev_best_centroids.row(c);
        std::copy(src.begin(), src.end(), init.row(c).begin());
      }
      double far = -1;
      std::size_t far_p = 0;
      for (std::size_t p = 0; p < r.values.rows(); ++p) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < prev_best_centroids.rows(); ++c)
          nearest = std::min(nearest, sq_dist(r.values.row(p), prev_best_centroids.row(c)));
        if (nearest > far) {
          far = nearest;
          far_p = p;
        }
      }
      auto src = r.values.row(far_p);
      std::copy(src.begin(), src.end(), init.row(static_cast<std::size_t>(k - 1)).begin());
      LloydResult res = lloyd(r.values, init, max_iter, tol);
      if (res.wcss < best.wcss) best = std::move(res);
    }
    prev_best_centroids = best.centroids;
    curve.emplace_back(k, best.wcss);
  }
  return curve;
}

std::vector<std::string> cluster_members(const ClusterModel& m, const std::string& anchor) {
  auto it = m.assignments.find(anchor);
  if (it == m.assignments.end()) throw UnknownTicker(anchor);
  int id = it->second;
  std::vector<std::string> members;
  for (const auto& [ticker, c] : m.assignments) {
    if (c == id) members.push_back(ticker);
  }
  return members;  // map iteration is already sorted
}

Series cluster_feature(const ReturnMatrix& r, const std::vector<std::string>& members,
                       const std::string& anchor, std::vector<std::string>* warnings) {
  if (members.empty()) throw Error("member list is empty");
  if (std::find(members.begin(), members.end(), anchor) == members.end())
    throw UnknownTicker(anchor);

  std::vector<std::size_t> peer_rows;
  for (const auto& t : members) {
    if (t == anchor) continue;
    peer_rows.push_back(r.ticker_index(t));
  }
  Series out(r.dates.size(), 0.0);
  if (peer_rows.empty()) {
    if (warnings)
      warnings->push_back("cluster of '" + anchor +
                          "' has no other members; idiosyncratic factor is all zero");
    return out;
  }
  for (std::size_t j = 0; j < r.dates.size(); ++j) {
    double acc = 0;
    for (std::size_t i : peer_rows) acc += r.values(i, j);
    out[j] = acc / static_cast<double>(peer_rows.size());
  }
  return out;
}

}  // namespace dowlab::cluster
