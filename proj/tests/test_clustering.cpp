#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "dowlab/clustering.hpp"
#include "dowlab/errors.hpp"
#include "dowlab/ingest.hpp"
#include "testsupport.hpp"

using namespace dowlab;
using namespace dowlab::cluster;

namespace {

// Wraps anonymous points as a ticker table so the ticker-level API applies.
ReturnMatrix as_returns(const Matrix& points) {
  ReturnMatrix r;
  for (std::size_t i = 0; i < points.rows(); ++i) r.tickers.push_back("T" + std::to_string(i));
  std::sort(r.tickers.begin(), r.tickers.end());
  for (std::size_t j = 0; j < points.cols(); ++j)
    r.dates.push_back(Date{2011, 1, 7 + static_cast<int>(7 * j)});
  r.values = points;
  return r;
}

Matrix matrix_of(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

ReturnMatrix fixture_returns() {
  auto dir = testsupport::make_temp_dir("cluster");
  auto [d, rep] = ingest::load_and_validate(testsupport::dataset_path(dir));
  return features::pivot_returns(d);
}

}  // namespace

TEST_CASE("two well-separated pairs split exactly, matching the exhaustive optimum") {
  Matrix points = matrix_of({{0}, {1}, {10}, {11}});
  auto r = as_returns(points);
  ClusterModel m = kmeans_best(r, 2, 42, 10);

  // Optimal partition is {0,1} vs {10,11}: each pair contributes 2 * 0.5^2.
  CHECK(m.wcss == doctest::Approx(1.0));
  CHECK(m.wcss == doctest::Approx(testsupport::best_two_cluster_wcss(points)));
  CHECK(m.assignments.at("T0") == m.assignments.at("T1"));
  CHECK(m.assignments.at("T2") == m.assignments.at("T3"));
  CHECK(m.assignments.at("T0") != m.assignments.at("T2"));
}

TEST_CASE("restarted k-means finds the exhaustive two-cluster optimum on random points") {
  std::mt19937_64 rng(20110107);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int round = 0; round < 3; ++round) {
    Matrix points(10, 3);
    for (std::size_t i = 0; i < points.rows(); ++i)
      for (std::size_t j = 0; j < points.cols(); ++j) points(i, j) = u(rng);
    auto r = as_returns(points);
    ClusterModel m = kmeans_best(r, 2, 7 + static_cast<std::uint64_t>(round), 30);
    double oracle = testsupport::best_two_cluster_wcss(points);
    CHECK(m.wcss == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("equidistant points go to the lowest cluster index") {
  Matrix points = matrix_of({{0.0}, {2.0}});
  Matrix init = matrix_of({{1.0}, {1.0}});  // identical centroids: every tie
  LloydResult res = lloyd(points, init, 0, 1e-6);
  CHECK(res.assignment == std::vector<int>{0, 0});
  CHECK(res.iterations == 0);
  REQUIRE(res.wcss_trace.size() == 1);
  CHECK(res.wcss == doctest::Approx(2.0));
}

TEST_CASE("an emptied cluster is reseeded and the run still converges") {
  // Both points start tied to centroid 0, leaving cluster 1 empty.
  Matrix points = matrix_of({{0.0}, {2.0}});
  Matrix init = matrix_of({{1.0}, {1.0}});
  LloydResult res = lloyd(points, init, 50, 1e-12);
  CHECK(res.wcss == doctest::Approx(0.0));
  std::vector<int> sorted = res.assignment;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1});  // both clusters end non-empty
}

TEST_CASE("the objective trace never increases") {
  auto r = fixture_returns();
  ClusterModel m = kmeans(r, 3, 42);
  REQUIRE(m.wcss_trace.size() == static_cast<std::size_t>(m.iterations) + 1);
  for (std::size_t i = 1; i < m.wcss_trace.size(); ++i) {
    CHECK(m.wcss_trace[i] <= m.wcss_trace[i - 1] + 1e-9);
  }
  CHECK(m.wcss == m.wcss_trace.back());
  CHECK(m.iterations >= 1);
  CHECK(m.k == 3);
  CHECK(m.centroids.rows() == 3);
  CHECK(m.centroids.cols() == 25);
  CHECK(m.assignments.size() == 30);
  for (const auto& [ticker, c] : m.assignments) {
    CHECK(c >= 0);
    CHECK(c < 3);
  }
}

TEST_CASE("the same seed reproduces the same clustering") {
  auto r = fixture_returns();
  ClusterModel a = kmeans(r, 3, 99);
  ClusterModel b = kmeans(r, 3, 99);
  CHECK(a.assignments == b.assignments);
  CHECK(a.wcss == b.wcss);
  CHECK(a.centroids == b.centroids);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("the multi-start winner is the minimum over its restarts") {
  auto r = fixture_returns();
  ClusterModel best = kmeans_best(r, 3, 42, 10);
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    lowest = std::min(lowest, kmeans(r, 3, 42 + static_cast<std::uint64_t>(i)).wcss);
  }
  CHECK(best.wcss == lowest);
  CHECK(best.seed == 42);  // reports the base seed, not the winning restart's
}

TEST_CASE("the elbow curve is non-increasing in k") {
  auto r = fixture_returns();
  auto curve = elbow_curve(r, 6, 42, 5);
  REQUIRE(curve.size() == 6);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].first == static_cast<int>(i) + 1);
    if (i > 0) CHECK(curve[i].second <= curve[i - 1].second + 1e-9);
  }

  // k=1 has a closed form: the total squared deviation around the mean week
  // profile. An independent check of the curve's first point.
  Series mean(r.values.cols(), 0.0);
  for (std::size_t i = 0; i < r.values.rows(); ++i)
    for (std::size_t j = 0; j < r.values.cols(); ++j) mean[j] += r.values(i, j);
  for (auto& v : mean) v /= static_cast<double>(r.values.rows());
  double total = 0;
  for (std::size_t i = 0; i < r.values.rows(); ++i) {
    for (std::size_t j = 0; j < r.values.cols(); ++j) {
      double dev = r.values(i, j) - mean[j];
      total += dev * dev;
    }
  }
  CHECK(curve[0].second == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("k is validated against the point count") {
  auto r = fixture_returns();
  CHECK_THROWS_AS(kmeans(r, 0, 42), InvalidK);
  CHECK_THROWS_AS(kmeans(r, 31, 42), InvalidK);
  CHECK_THROWS_AS(kmeans_best(r, -1, 42), InvalidK);
  CHECK_THROWS_AS(elbow_curve(r, 0, 42), InvalidK);

  ReturnMatrix empty;
  CHECK_THROWS_AS(kmeans(empty, 1, 42), EmptyMatrix);

  Matrix points = matrix_of({{0.0}, {2.0}});
  Matrix bad_dim = matrix_of({{1.0, 1.0}});
  CHECK_THROWS_AS(lloyd(points, bad_dim, 10, 1e-6), DimensionMismatch);
}

TEST_CASE("membership lists the anchor's whole cluster in sorted order") {
  ClusterModel m;
  m.k = 2;
  m.assignments = {{"AXP", 0}, {"BA", 1}, {"DIS", 0}, {"AA", 0}, {"CAT", 1}};
  auto members = cluster_members(m, "DIS");
  CHECK(members == std::vector<std::string>{"AA", "AXP", "DIS"});
  CHECK(cluster_members(m, "BA") == std::vector<std::string>{"BA", "CAT"});
  CHECK_THROWS_AS(cluster_members(m, "ZZZ"), UnknownTicker);
}

TEST_CASE("the cluster feature is the peers' mean return, anchor excluded") {
  auto r = as_returns(matrix_of({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}));
  // Peers of T0 within {T0, T1, T2} are T1 and T2.
  Series f = cluster_feature(r, {"T0", "T1", "T2"}, "T0");
  CHECK(f == Series{4.0, 5.0});

  // A single peer is just that stock's series.
  CHECK(cluster_feature(r, {"T0", "T2"}, "T0") == Series{5.0, 6.0});

  std::vector<std::string> warnings;
  Series lonely = cluster_feature(r, {"T1"}, "T1", &warnings);
  CHECK(lonely == Series{0.0, 0.0});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("no other members") != std::string::npos);

  // Without a sink the anchor-only case must still return quietly.
  CHECK(cluster_feature(r, {"T1"}, "T1") == Series{0.0, 0.0});

  CHECK_THROWS_AS(cluster_feature(r, {"T1", "T2"}, "T0"), UnknownTicker);
  CHECK_THROWS_AS(cluster_feature(r, {}, "T0"), Error);
}
