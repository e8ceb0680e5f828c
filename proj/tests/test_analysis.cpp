#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "coadapt/analysis.hpp"

using namespace coadapt;

namespace {
Matrix two_blobs(int per_side, std::uint64_t seed, double sep = 10.0, double spread = 0.2) {
  Rng rng(seed);
  Matrix x;
  for (int i = 0; i < per_side; ++i)
    x.push_back({spread * rng.normal(), spread * rng.normal()});
  for (int i = 0; i < per_side; ++i)
    x.push_back({sep + spread * rng.normal(), sep + spread * rng.normal()});
  return x;
}

std::vector<int> blob_truth(int per_side) {
  std::vector<int> t(2 * per_side, 0);
  for (int i = per_side; i < 2 * per_side; ++i) t[i] = 1;
  return t;
}
}  // namespace

TEST_CASE("standardization centers, scales, and flags constant columns") {
  const Matrix x = {{1.0, 10.0, 5.0}, {2.0, 20.0, 5.0}, {3.0, 30.0, 5.0}};
  const StandardizeResult r = standardize(x);
  CHECK(r.means == std::vector<double>{2.0, 20.0, 5.0});
  CHECK(r.sds[0] == 1.0);
  CHECK(r.sds[1] == 10.0);
  CHECK(r.constant_columns == std::vector<int>{2});
  for (int i = 0; i < 3; ++i) {
    CHECK(r.data[i][0] == static_cast<double>(i - 1));
    CHECK(r.data[i][1] == static_cast<double>(i - 1));
    CHECK(r.data[i][2] == 0.0);
  }
}

TEST_CASE("the symmetric eigensolver reproduces a known spectrum") {
  // A = [[2,1,0],[1,2,0],[0,0,3]] has eigenvalues {1, 3, 3}
  const Matrix a = {{2.0, 1.0, 0.0}, {1.0, 2.0, 0.0}, {0.0, 0.0, 3.0}};
  std::vector<double> evals;
  Matrix evecs;
  detail::jacobi_eigen(a, evals, evecs);
  std::vector<double> sorted = evals;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[0] == Catch::Approx(1.0).margin(1e-10));
  CHECK(sorted[1] == Catch::Approx(3.0).margin(1e-10));
  CHECK(sorted[2] == Catch::Approx(3.0).margin(1e-10));

  // reconstruction: sum_c eval_c * v_c v_c^T == A (columns are eigenvectors)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += evals[c] * evecs[i][c] * evecs[j][c];
      REQUIRE(s == Catch::Approx(a[i][j]).margin(1e-10));
    }
  // orthonormality
  for (int c1 = 0; c1 < 3; ++c1)
    for (int c2 = 0; c2 < 3; ++c2) {
      double dot = 0.0;
      for (int i = 0; i < 3; ++i) dot += evecs[i][c1] * evecs[i][c2];
      REQUIRE(dot == Catch::Approx(c1 == c2 ? 1.0 : 0.0).margin(1e-10));
    }
}

TEST_CASE("pca recovers a planted anisotropic axis") {
  Rng rng(404);
  Matrix x;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 4000; ++i) {
    const double z1 = 3.0 * rng.normal(), z2 = rng.normal();
    x.push_back({z1 * s + z2 * s, z1 * s - z2 * s});
  }
  const PcaResult r = pca(x);
  CHECK(r.eigenvalues[0] == Catch::Approx(9.0).epsilon(0.15));
  CHECK(r.eigenvalues[1] == Catch::Approx(1.0).epsilon(0.15));
  CHECK(r.variance_ratio[0] == Catch::Approx(0.9).margin(0.03));
  CHECK(std::fabs(r.components[0][0]) == Catch::Approx(s).margin(0.03));
  CHECK(std::fabs(r.components[0][1]) == Catch::Approx(s).margin(0.03));
  // the sign fix makes the dominant loading positive
  CHECK(r.components[0][0] > 0.0);
  CHECK(r.retained == 2);  // 0.9 < default target 0.95

  CHECK(pca(x, 1).retained == 1);
  CHECK_THROWS_AS(pca(Matrix{{1.0}}, 0), InvalidArgument);
  CHECK_THROWS_AS(pca(Matrix{{1.0, 2.0}, {1.0}}, 0), DimensionMismatch);
}

TEST_CASE("k-means separates well-separated blobs perfectly") {
  const Matrix x = two_blobs(60, 808);
  const KMeansResult r = kmeans(x, 2, 5, 31);
  CHECK(adjusted_rand_index(r.labels, blob_truth(60)) == 1.0);
  std::vector<double> c0 = r.centroids[0], c1 = r.centroids[1];
  if (c0[0] > c1[0]) std::swap(c0, c1);
  CHECK(c0[0] == Catch::Approx(0.0).margin(0.2));
  CHECK(c1[0] == Catch::Approx(10.0).margin(0.2));
  CHECK(r.inertia < 60.0);

  const KMeansResult r3 = kmeans(x, 3, 5, 31);  // over-segmentation still runs
  CHECK(r3.labels.size() == x.size());
  CHECK_THROWS_AS(kmeans(x, 0, 5, 31), InvalidArgument);
  CHECK_THROWS_AS(kmeans(Matrix{{1.0}}, 2, 5, 31), InvalidArgument);
}

TEST_CASE("k-means is deterministic for a fixed seed") {
  const Matrix x = two_blobs(40, 999);
  const KMeansResult a = kmeans(x, 2, 5, 7);
  const KMeansResult b = kmeans(x, 2, 5, 7);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("the mixture model agrees on clean blobs") {
  const Matrix x = two_blobs(50, 2024);
  const GmmResult g = gmm_fit(x, 2, 11);
  CHECK(adjusted_rand_index(g.labels, blob_truth(50)) == 1.0);
  CHECK(g.weights[0] + g.weights[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(g.weights[0] == Catch::Approx(0.5).margin(0.05));
  CHECK(g.responsibilities.size() == x.size());
  CHECK_THROWS_AS(gmm_fit(x, 0, 11), InvalidArgument);
}

TEST_CASE("silhouette rewards real structure") {
  const Matrix x = two_blobs(40, 5150);
  const KMeansResult r = kmeans(x, 2, 5, 3);
  CHECK(silhouette_score(x, r.labels, 2) > 0.8);

  // an arbitrary split of one blob scores poorly
  Rng rng(61);
  Matrix blob;
  std::vector<int> half;
  for (int i = 0; i < 60; ++i) {
    blob.push_back({rng.normal(), rng.normal()});
    half.push_back(i % 2);
  }
  CHECK(silhouette_score(blob, half, 2) < 0.3);
}

TEST_CASE("adjusted rand index is permutation invariant and centered") {
  const std::vector<int> a = {0, 0, 1, 1, 2, 2};
  const std::vector<int> flipped = {2, 2, 0, 0, 1, 1};
  CHECK(adjusted_rand_index(a, a) == 1.0);
  CHECK(adjusted_rand_index(a, flipped) == 1.0);

  Rng rng(88);
  std::vector<int> r1, r2;
  for (int i = 0; i < 400; ++i) {
    r1.push_back(static_cast<int>(rng.below(3)));
    r2.push_back(static_cast<int>(rng.below(3)));
  }
  CHECK(std::fabs(adjusted_rand_index(r1, r2)) < 0.05);
  CHECK_THROWS_AS(adjusted_rand_index(a, std::vector<int>{0, 1}), DimensionMismatch);
}

TEST_CASE("grid designs enumerate the cross product") {
  const std::vector<DesignParameter> space = {{"a", 0.0, 1.0}, {"b", 10.0, 30.0}};
  const Matrix g = grid_design(space, 3);
  REQUIRE(g.size() == 9);
  std::set<std::pair<double, double>> seen;
  for (const auto& row : g) seen.insert({row[0], row[1]});
  CHECK(seen.size() == 9);
  for (double a : {0.0, 0.5, 1.0})
    for (double b : {10.0, 20.0, 30.0}) CHECK(seen.count({a, b}) == 1);
  CHECK_THROWS_AS(grid_design({{"a", 0.0, 1.0}, {"b", 0.0, 1.0}, {"c", 0.0, 1.0},
                               {"d", 0.0, 1.0}},
                              18),
                  TooManyPoints);
  // a single level collapses to the midpoint
  const Matrix mid = grid_design(space, 1);
  REQUIRE(mid.size() == 1);
  CHECK(mid[0] == std::vector<double>{0.5, 20.0});
  CHECK_THROWS_AS(grid_design(space, 0), InvalidArgument);
}

TEST_CASE("latin hypercube fills every stratum once") {
  const std::vector<DesignParameter> space = {{"a", 0.0, 1.0}, {"b", -5.0, 5.0}};
  const Matrix x = lhs_design(space, 50, 1234);
  REQUIRE(x.size() == 50);
  for (std::size_t j = 0; j < 2; ++j) {
    const double lo = space[j].lower, hi = space[j].upper;
    std::vector<int> strata(50, 0);
    for (const auto& row : x) {
      REQUIRE(row[j] >= lo);
      REQUIRE(row[j] <= hi);
      int k = static_cast<int>((row[j] - lo) / (hi - lo) * 50.0);
      if (k == 50) k = 49;
      strata[k] += 1;
    }
    for (int c : strata) REQUIRE(c == 1);
  }
  CHECK(lhs_design(space, 50, 1234) == x);
  CHECK(lhs_design(space, 50, 1235) != x);
}

TEST_CASE("morris effects of a linear response are exact") {
  const std::vector<DesignParameter> space = {{"a", 0.0, 1.0}, {"b", 0.0, 1.0}};
  auto f = [](const std::vector<double>& v) { return 2.0 * v[0]; };
  const MorrisResult m = morris_screen(f, space, 6, 4, 77);
  REQUIRE(m.rows.size() == 2);
  CHECK(m.rows[0].param == "a");
  CHECK(m.rows[0].mu == Catch::Approx(2.0).margin(1e-12));
  CHECK(m.rows[0].mu_star == Catch::Approx(2.0).margin(1e-12));
  CHECK(m.rows[0].sigma == Catch::Approx(0.0).margin(1e-12));
  CHECK(m.rows[1].mu_star == Catch::Approx(0.0).margin(1e-12));
  CHECK(m.evaluations == 6 * 3);
  CHECK(m.trajectories == 6);
}

TEST_CASE("morris flags interactions through sigma") {
  const std::vector<DesignParameter> space = {{"a", 0.0, 1.0}, {"b", 0.0, 1.0}};
  auto f = [](const std::vector<double>& v) { return v[0] * v[1]; };
  const MorrisResult m = morris_screen(f, space, 20, 4, 55);
  CHECK(m.rows[0].mu_star > 0.1);
  CHECK(m.rows[0].sigma > 0.05);  // effect of a depends on where b sits
  CHECK(m.evaluations == 20 * 3);

  CHECK_THROWS_AS(morris_screen(f, space, 1, 4, 1), InvalidArgument);
  CHECK_THROWS_AS(morris_screen(f, space, 4, 3, 1), InvalidArgument);
  CHECK_THROWS_AS(morris_screen(f, {}, 4, 4, 1), InvalidArgument);
}

TEST_CASE("cluster summaries name what the clusters do") {
  std::vector<RunFeatures> feats;
  std::vector<int> labels;
  Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    const bool hot = i >= 6;
    RunFeatures f;
    f.run_id = "r" + std::to_string(i);
    f.mean_aggregate = hot ? 20.0 : 5.0;
    f.overload_freq = (hot ? 0.9 : 0.01) + 0.001 * rng.uniform();
    f.h_mu = (hot ? 0.9 : 0.1) + 0.001 * rng.uniform();
    f.c_mu = hot ? 1.5 : 0.2;
    f.e_pred = 0.1;
    f.regime = hot ? "VPVA" : "CPCA";
    f.label = "";
    feats.push_back(f);
    labels.push_back(hot ? 1 : 0);
  }
  const Matrix std_x = standardize(feature_matrix(feats)).data;
  const ClusterReport rep = cluster_report(feats, labels, 2, std_x);
  REQUIRE(rep.clusters.size() == 2);
  CHECK(rep.clusters[0].size == 6);
  CHECK(rep.clusters[1].size == 6);
  auto has_name = [](const ClusterSummary& c, const std::string& n) {
    for (const auto& s : c.suggested_names)
      if (s == n) return true;
    return false;
  };
  CHECK(has_name(rep.clusters[0], "stable"));
  CHECK(has_name(rep.clusters[1], "overloaded"));
  CHECK(rep.clusters[0].feature_means[0] == Catch::Approx(5.0));
  CHECK(std::isnan(rep.ari_vs_labels));
}

TEST_CASE("the feature matrix lays out the five diagnostics") {
  RunFeatures f;
  f.mean_aggregate = 1.0;
  f.overload_freq = 2.0;
  f.h_mu = 3.0;
  f.c_mu = 4.0;
  f.e_pred = 5.0;
  const Matrix m = feature_matrix({f});
  REQUIRE(m.size() == 1);
  CHECK(m[0] == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});
}
