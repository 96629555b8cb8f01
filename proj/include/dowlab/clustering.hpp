#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dowlab/features.hpp"
#include "dowlab/matrix.hpp"

namespace dowlab::cluster {

using features::ReturnMatrix;

struct ClusterModel {
  int k = 0;
  Matrix centroids;                        // k x weeks
  std::map<std::string, int> assignments;  // ticker -> cluster id in [0, k)
  double wcss = 0;                         // sum of squared distances to assigned centroids
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> wcss_trace;          // per-iteration objective, non-increasing
};

/// Raw Lloyd result over anonymous points; wrapped by the ticker-level API.
struct LloydResult {
  Matrix centroids;
  std::vector<int> assignment;
  double wcss = 0;
  int iterations = 0;
  std::vector<double> wcss_trace;
};

/// Lloyd iteration from explicit initial centroids. Ties in nearest-centroid
/// assignment break toward the lowest cluster index; an emptied cluster is
/// reseeded with the point farthest from its assigned centroid. Stops when
/// assignments are stable, the objective improves by less than tol, or
/// max_iter is reached. The per-iteration objective is checked non-increasing.
LloydResult lloyd(const Matrix& points, const Matrix& initial_centroids, int max_iter,
                  double tol);

/// Seeded k-means: initial centroids are k distinct data points chosen by the
/// seeded generator, then Lloyd iteration.
ClusterModel kmeans(const ReturnMatrix& r, int k, std::uint64_t seed, int max_iter = 300,
                    double tol = 1e-6);

/// Best of `restarts` seeded runs (restart i uses seed + i; ties on equal
/// objective keep the lowest restart index).
ClusterModel kmeans_best(const ReturnMatrix& r, int k, std::uint64_t seed, int restarts = 10,
                         int max_iter = 300, double tol = 1e-6);

/// (k, best objective) for k = 1..k_max. Each k runs `restarts` seeded starts
/// plus one start warm-loaded from the previous k's best centroids and the
/// point farthest from them, which makes the curve non-increasing in k.
std::vector<std::pair<int, double>> elbow_curve(const ReturnMatrix& r, int k_max,
                                                std::uint64_t seed, int restarts = 10,
                                                int max_iter = 300, double tol = 1e-6);

/// All tickers sharing the anchor's cluster, anchor included, sorted.
std::vector<std::string> cluster_members(const ClusterModel& m, const std::string& anchor);

/// Per-week equal-weighted mean return of the members excluding the anchor.
/// An anchor-only member list yields the all-zero series plus a warning.
Series cluster_feature(const ReturnMatrix& r, const std::vector<std::string>& members,
                       const std::string& anchor, std::vector<std::string>* warnings = nullptr);

}  // namespace dowlab::cluster
