#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "dualtier/clusters.hpp"
#include "dualtier/dbscan.hpp"
#include "dualtier/dpc.hpp"

#include "oracles.hpp"

using namespace dualtier;

namespace {

FeatureMatrix two_blobs(std::uint64_t seed, std::size_t count = 30) {
  FeatureMatrix m = oracles::make_blobs(
      {{"left", {0.0, 0.0}, 0.3, count}, {"right", {10.0, 0.0}, 0.3, count}},
      seed, true);
  return m;
}

}  // namespace

TEST_CASE("dbscan finds two well-separated blobs") {
  FeatureMatrix points = two_blobs(1);
  DbscanParams params;
  params.eps = 1.0;
  params.min_pts = 3;
  const ClusterAssignment out = dbscan(points, params);
  CHECK(out.n_clusters == 2);

  const auto naive = oracles::naive_dbscan(points, 1.0, 3);
  CHECK(oracles::same_partition(out.labels, naive));

  // blob membership: every cluster is label-pure
  std::map<int, std::set<std::string>> truth_by_cluster;
  for (std::size_t i = 0; i < points.n_rows; ++i) {
    truth_by_cluster[out.labels[i]].insert(points.label_name(i));
  }
  for (const auto& [cluster, names] : truth_by_cluster) {
    CHECK(names.size() == 1);
  }
}

TEST_CASE("dbscan degenerate inputs") {
  SECTION("single point below min_pts is noise") {
    FeatureMatrix m;
    m.push_row(std::vector<double>{1.0, 2.0});
    DbscanParams params;
    params.eps = 1.0;
    params.min_pts = 2;
    const ClusterAssignment out = dbscan(m, params);
    CHECK(out.n_clusters == 0);
    CHECK(out.labels == std::vector<int>{-1});
  }
  SECTION("identical points form one cluster") {
    FeatureMatrix m;
    for (int i = 0; i < 6; ++i) m.push_row(std::vector<double>{4.0, 4.0});
    DbscanParams params;
    params.eps = 0.5;
    params.min_pts = 6;
    const ClusterAssignment out = dbscan(m, params);
    CHECK(out.n_clusters == 1);
    for (int l : out.labels) CHECK(l == 0);
  }
  SECTION("empty input errors") {
    CHECK_THROWS_AS(dbscan(FeatureMatrix{}, DbscanParams{}), DataError);
  }
}

TEST_CASE("dbscan equals the naive reference on random data") {
  Rng rng(33);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 40 + rng.index(160);
    const std::size_t d = 2 + rng.index(4);
    FeatureMatrix m;
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : row) v = rng.real(0, 1);
      m.push_row(row);
    }
    DbscanParams params;
    params.eps = 0.05 + rng.real() * 0.2;
    params.min_pts = 2 + rng.index(6);
    const ClusterAssignment out = dbscan(m, params);
    const auto naive = oracles::naive_dbscan(m, params.eps, params.min_pts);
    INFO("trial " << trial << " n=" << n << " d=" << d << " eps=" << params.eps
                  << " min_pts=" << params.min_pts);
    CHECK(oracles::same_partition(out.labels, naive));
  }
}

TEST_CASE("dbscan partition is order-invariant on separated blobs") {
  DbscanParams params;
  params.eps = 1.0;
  params.min_pts = 3;
  const FeatureMatrix a = two_blobs(21);
  const ClusterAssignment base = dbscan(a, params);

  // same points in a different row order
  std::vector<std::size_t> order(a.n_rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(5);
  rng.shuffle(order);
  const FeatureMatrix b = select_rows(a, order);
  const ClusterAssignment reordered = dbscan(b, params);

  std::vector<int> mapped_back(a.n_rows);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    mapped_back[order[pos]] = reordered.labels[pos];
  }
  CHECK(oracles::same_partition(base.labels, mapped_back));
}

TEST_CASE("median_knn_distance eps heuristic clusters normalized blobs") {
  // bucket-like regime: tight 4-d blobs of accumulated unknowns
  FeatureMatrix points = oracles::make_blobs(
      {{"x", {0.1, 0.1, 0.9, 0.1}, 0.03, 60}, {"y", {0.9, 0.9, 0.1, 0.9}, 0.03, 40}},
      77, true);
  DbscanParams params;  // eps = 0: auto
  const ClusterAssignment out = dbscan(points, params);
  REQUIRE(out.n_clusters == 2);
  // the median-of-5NN eps is deliberately tight: rim points may fall to
  // noise, but the cluster cores must be recovered and blob-pure
  const auto sizes = out.cluster_sizes();
  CHECK(sizes[0] + sizes[1] >= 70);
  std::map<int, std::set<std::string>> truths;
  for (std::size_t i = 0; i < points.n_rows; ++i) {
    if (out.labels[i] >= 0) truths[out.labels[i]].insert(points.label_name(i));
  }
  for (const auto& [cluster, names] : truths) CHECK(names.size() == 1);
}

TEST_CASE("dpc separates two blobs with two peaks") {
  FeatureMatrix points = two_blobs(9, 25);
  DpcParams params;
  params.dc = 1.0;
  params.peaks = 2;
  const ClusterAssignment out = dpc(points, params);
  REQUIRE(out.n_clusters == 2);
  // clusters coincide with blob membership
  std::map<std::string, std::set<int>> clusters_by_truth;
  for (std::size_t i = 0; i < points.n_rows; ++i) {
    clusters_by_truth[points.label_name(i)].insert(out.labels[i]);
  }
  CHECK(clusters_by_truth["left"].size() == 1);
  CHECK(clusters_by_truth["right"].size() == 1);
  CHECK(*clusters_by_truth["left"].begin() != *clusters_by_truth["right"].begin());
}

TEST_CASE("dpc density matches all-pairs counting and delta conventions hold") {
  Rng rng(123);
  FeatureMatrix m;
  for (int i = 0; i < 50; ++i) {
    m.push_row(std::vector<double>{rng.real(0, 1), rng.real(0, 1)});
  }
  DpcParams params;
  params.dc = 0.25;
  const DpcDiagnostics diag = dpc_diagnostics(m, params);

  // independent rho: all-pairs count of strictly-closer points
  const auto rows = oracles::to_rows(m);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    double count = 0.0;
    for (std::size_t j = 0; j < m.n_rows; ++j) {
      if (j != i && oracles::dist(rows[i], rows[j]) < params.dc) count += 1.0;
    }
    CHECK(diag.rho[i] == count);
  }

  // the global density peak's delta is its max distance to any point
  const std::size_t peak = diag.order[0];
  double peak_max = 0.0;
  for (std::size_t j = 0; j < m.n_rows; ++j) {
    peak_max = std::max(peak_max, oracles::dist(rows[peak], rows[j]));
  }
  CHECK(diag.delta[peak] == peak_max);
  CHECK(diag.parent[peak] == -1);

  // every other point: delta is the min distance to a denser point (with the
  // index tie rule), and its parent attains it
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    if (i == peak) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.n_rows; ++j) {
      if (diag.rho[j] > diag.rho[i] || (diag.rho[j] == diag.rho[i] && j < i)) {
        best = std::min(best, oracles::dist(rows[i], rows[j]));
      }
    }
    CHECK(diag.delta[i] == best);
    CHECK(oracles::dist(rows[i], rows[static_cast<std::size_t>(diag.parent[i])]) ==
          diag.delta[i]);
  }
}

TEST_CASE("dpc density is equivariant under row permutation") {
  FeatureMatrix m = two_blobs(61, 20);
  DpcParams params;
  params.dc = 0.8;
  const DpcDiagnostics base = dpc_diagnostics(m, params);

  std::vector<std::size_t> order(m.n_rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(14);
  rng.shuffle(order);
  const DpcDiagnostics permuted = dpc_diagnostics(select_rows(m, order), params);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    CHECK(permuted.rho[pos] == base.rho[order[pos]]);
  }
}

TEST_CASE("dpc explicit (rho_min, delta_min) thresholds select the peaks") {
  FeatureMatrix points = two_blobs(44, 25);
  DpcParams params;
  params.dc = 1.0;
  params.use_thresholds = true;
  params.rho_min = 5.0;    // dense blob cores clear this easily
  params.delta_min = 5.0;  // only points far from any denser point qualify
  const ClusterAssignment out = dpc(points, params);
  CHECK(out.n_clusters == 2);

  // impossible thresholds fall back to a single cluster at the density peak
  DpcParams impossible = params;
  impossible.rho_min = 1e9;
  const ClusterAssignment fallback = dpc(points, impossible);
  CHECK(fallback.n_clusters == 1);
}

TEST_CASE("dpc handles degenerate inputs") {
  SECTION("all identical points form a single cluster") {
    FeatureMatrix m;
    for (int i = 0; i < 5; ++i) m.push_row(std::vector<double>{1.0});
    const ClusterAssignment out = dpc(m, DpcParams{});
    CHECK(out.n_clusters == 1);
    for (int l : out.labels) CHECK(l == 0);
  }
  SECTION("fewer than two points errors") {
    FeatureMatrix m;
    m.push_row(std::vector<double>{1.0});
    CHECK_THROWS_AS(dpc(m, DpcParams{}), DataError);
  }
}

TEST_CASE("largest_cluster picks the max count with low-id ties") {
  SECTION("sizes {5, 9} -> cluster 1") {
    ClusterAssignment a;
    a.n_clusters = 2;
    for (int i = 0; i < 5; ++i) a.labels.push_back(0);
    for (int i = 0; i < 9; ++i) a.labels.push_back(1);
    const auto [id, members] = largest_cluster(a);
    CHECK(id == 1);
    CHECK(members.size() == 9);
  }
  SECTION("tie {7, 7} -> cluster 0") {
    ClusterAssignment a;
    a.n_clusters = 2;
    for (int i = 0; i < 7; ++i) a.labels.push_back(1);
    for (int i = 0; i < 7; ++i) a.labels.push_back(0);
    CHECK(largest_cluster(a).first == 0);
  }
  SECTION("noise is never selected; all-noise errors") {
    ClusterAssignment a;
    a.n_clusters = 0;
    a.labels = {-1, -1, -1};
    CHECK_THROWS_AS(largest_cluster(a), DataError);
  }
  SECTION("random assignment matches a counting oracle") {
    Rng rng(88);
    ClusterAssignment a;
    a.n_clusters = 6;
    std::map<int, std::size_t> histogram;
    for (int i = 0; i < 300; ++i) {
      const int label = static_cast<int>(rng.index(7)) - 1;  // -1..5
      a.labels.push_back(label);
      if (label >= 0) ++histogram[label];
    }
    int expected = 0;
    for (const auto& [cluster, count] : histogram) {
      if (count > histogram[expected]) expected = cluster;
    }
    CHECK(largest_cluster(a).first == expected);
  }
}

TEST_CASE("cluster_quality reproduces the PSL formulas") {
  SECTION("harmonic-mean fixed point: psl1 = psl2 = p") {
    // 4 of 5 cluster members are 'dos'; batch holds 5 'dos' total
    const std::vector<std::string> member{"dos", "dos", "dos", "dos", "probe"};
    const std::vector<std::string> batch{"dos", "dos", "dos", "dos", "dos",
                                         "probe", "probe"};
    const ClusterQuality q = cluster_quality(member, batch);
    CHECK(q.dominant_class == "dos");
    CHECK(q.d == 4);
    CHECK(q.n == 5);
    CHECK(q.t_n == 5);
    CHECK(q.psl1 == 0.8);
    CHECK(q.psl2 == 0.8);
    CHECK(q.pslc == Catch::Approx(0.8));
  }
  SECTION("pure cluster: psl1 = 1; full coverage: psl2 = 1") {
    const std::vector<std::string> member{"x", "x", "x"};
    const std::vector<std::string> batch{"x", "x", "x", "y"};
    const ClusterQuality q = cluster_quality(member, batch);
    CHECK(q.psl1 == 1.0);
    CHECK(q.psl2 == 1.0);
    CHECK(q.pslc == 1.0);
  }
  SECTION("dominant-class tie breaks lexicographically") {
    const std::vector<std::string> member{"beta", "alpha"};
    const std::vector<std::string> batch{"alpha", "beta"};
    CHECK(cluster_quality(member, batch).dominant_class == "alpha");
  }
  SECTION("cluster members must come from the batch") {
    CHECK_THROWS_AS(cluster_quality({"x", "x"}, {"x", "y"}), DataError);
    CHECK_THROWS_AS(cluster_quality({}, {"x"}), DataError);
  }
}

TEST_CASE("PSLC bounds: harmonic <= geometric <= arithmetic, <= 2*min") {
  Rng rng(424242);
  for (int i = 0; i < 200; ++i) {
    const double p1 = 0.01 + 0.99 * rng.real();
    const double p2 = 0.01 + 0.99 * rng.real();
    const double h = ClusterQuality::from_scores(p1, p2).pslc;
    const double g = std::sqrt(p1 * p2);
    const double a = (p1 + p2) / 2.0;
    CHECK(h <= g + 1e-12);
    CHECK(g <= a + 1e-12);
    CHECK(h <= 2.0 * std::min(p1, p2) + 1e-12);
  }
  CHECK(ClusterQuality::from_scores(0.0, 0.0).pslc == 0.0);
}

TEST_CASE("PSLC matches the reported pure-math values") {
  CHECK(ClusterQuality::from_scores(0.99, 0.97).pslc == Catch::Approx(0.98).margin(0.01));
  CHECK(ClusterQuality::from_scores(1.00, 0.96).pslc == Catch::Approx(0.98).margin(0.01));
  CHECK(ClusterQuality::from_scores(1.00, 0.69).pslc == Catch::Approx(0.81).margin(0.02));
}
