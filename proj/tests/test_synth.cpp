#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "stabcert/clusterers.hpp"
#include "stabcert/metrics.hpp"
#include "stabcert/synth.hpp"

using namespace stabcert;

TEST_CASE("generators are reproducible for a fixed seed") {
  const auto a = gaussian_mixture(50, 3, 4, 0.5, {0.2, 0.3, 0.5},
                                  CenterGeometry::Simplex, 4.0, 99);
  const auto b = gaussian_mixture(50, 3, 4, 0.5, {0.2, 0.3, 0.5},
                                  CenterGeometry::Simplex, 4.0, 99);
  CHECK(a.data.points() == b.data.points());
  CHECK(a.labels == b.labels);

  const auto g1 = perturb_similarity(block_similarity(20, 2, {}, 1.0, 0.1, 0), 0.5, 5);
  const auto g2 = perturb_similarity(block_similarity(20, 2, {}, 1.0, 0.1, 0), 0.5, 5);
  CHECK(g1.weights() == g2.weights());
}

TEST_CASE("simplex centers realize the requested separation") {
  const double sep = 4.0 * std::sqrt(2.0);
  const auto gen = gaussian_mixture(40, 4, 15, 1e-9, {0.25, 0.25, 0.25, 0.25},
                                    CenterGeometry::Simplex, sep, 3);
  // With sigma ~ 0 the points sit at the centers.
  const Matrix& p = gen.data.points();
  for (int i = 0; i < gen.data.n(); ++i) {
    for (int j = 0; j < gen.data.n(); ++j) {
      if (gen.labels[i] != gen.labels[j]) {
        CHECK((p.row(i) - p.row(j)).norm() == doctest::Approx(sep).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("proportions are matched by largest-remainder allocation") {
  const int n = 200;
  const auto gen = gaussian_mixture(n, 4, 15, 0.6, {0.1, 0.2, 0.3, 0.4},
                                    CenterGeometry::Simplex, 5.66, 1);
  const Clustering c(gen.labels, 4);
  CHECK(c.size(0) == 20);
  CHECK(c.size(1) == 40);
  CHECK(c.size(2) == 60);
  CHECK(c.size(3) == 80);
}

TEST_CASE("sigma near zero gives exact recovery") {
  const auto gen = gaussian_mixture(60, 3, 3, 1e-9, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                                    CenterGeometry::Line, 1.0, 11);
  KMeansOptions o;
  o.init = KMeansInit::Labels;
  o.init_labels = gen.labels;
  const Clustering c = lloyd_kmeans(gen.data, 3, o);
  CHECK(em_distance(c, Clustering(gen.labels, 3)) == doctest::Approx(0.0));
}

TEST_CASE("non-normal mixture marginals") {
  const int n = 5000;
  const auto gen = non_normal_mixture(n, 2, 15, 1.0, {0.5, 0.5}, 7);
  const Matrix& p = gen.data.points();

  // Center each cluster, then pool the noise coordinates.
  std::vector<double> gamma_coord;
  std::vector<double> normal_coord;
  for (int k = 0; k < 2; ++k) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (gen.labels[i] == k) idx.push_back(i);
    for (int m : {0, 1}) {
      double mean = 0.0;
      for (int i : idx) mean += p(i, m);
      mean /= idx.size();
      for (int i : idx) {
        (m == 0 ? gamma_coord : normal_coord).push_back(p(i, m) - mean);
      }
    }
  }
  auto moments = [](const std::vector<double>& xs) {
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
      m2 += x * x;
      m3 += x * x * x;
    }
    m2 /= xs.size();
    m3 /= xs.size();
    return std::pair{m2, m3 / std::pow(m2, 1.5)};
  };
  const auto [gvar, gskew] = moments(gamma_coord);
  // Gamma(2, .) has skewness 2 / sqrt(2) = sqrt(2).
  CHECK(gskew == doctest::Approx(std::sqrt(2.0)).epsilon(0.25));
  const auto [nvar, nskew] = moments(normal_coord);
  CHECK(nskew == doctest::Approx(0.0).epsilon(0.3));
  CHECK(std::abs(nskew) < 0.3);
  CHECK(nvar == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("stochastic ball stays within unit radius") {
  const auto gen = stochastic_ball(200, 4, 2, 3.0, 13);
  const Matrix& p = gen.data.points();
  for (int i = 0; i < 200; ++i) {
    Eigen::RowVector2d center(3.0 * gen.labels[i], 0.0);
    CHECK((p.row(i) - center).norm() <= 1.0 + 1e-12);
  }
  const Clustering c(gen.labels, 4);
  CHECK(c.relative_sizes().p_min == doctest::Approx(0.25));
}

TEST_CASE("block similarity and perturbation") {
  const auto g = block_similarity(12, 3, {4, 4, 4}, 1.0, 0.25, 0);
  CHECK(g.weights()(0, 1) == 1.0);
  CHECK(g.weights()(0, 5) == 0.25);
  CHECK(g.weights()(0, 0) == 0.0);

  const auto gp = perturb_similarity(g, 0.0, 3);
  CHECK(gp.weights() == g.weights());

  const double sigma = 2.0;
  const auto gq = perturb_similarity(g, sigma, 3);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      const double base = g.weights()(i, j);
      CHECK(gq.weights()(i, j) >= base - 1e-12);
      CHECK(gq.weights()(i, j) <= (1.0 + sigma) * base + 1e-12);
      CHECK(gq.weights()(i, j) == gq.weights()(j, i));
    }
  }
}

TEST_CASE("partition enumeration matches stirling numbers") {
  CHECK(count_partitions(4, 2) == 7);
  CHECK(count_partitions(3, 3) == 1);
  CHECK(count_partitions(6, 2) == 31);

  for (int n = 1; n <= 10; ++n) {
    for (int K = 1; K <= std::min(4, n); ++K) {
      std::uint64_t seen = 0;
      std::set<std::vector<int>> unique;
      enumerate_partitions(n, K, [&](const Clustering& c) {
        ++seen;
        CHECK(c.K() == K);
        unique.insert(c.labels());
      });
      CHECK(seen == count_partitions(n, K));
      CHECK(unique.size() == seen);  // no duplicates up to relabeling
    }
  }
  CHECK_THROWS(enumerate_partitions(15, 2, [](const Clustering&) {}));
}

TEST_CASE("add outliers") {
  const auto gen = gaussian_mixture(50, 2, 2, 0.4, {0.5, 0.5},
                                    CenterGeometry::Line, 6.0, 23);
  CHECK(add_outliers(gen.data, 0, 1.0, 5).n() == 50);

  const Dataset with = add_outliers(gen.data, 20, 10.0, 5);
  CHECK(with.n() == 70);
  // Removing a little more than we added leaves at most the original points.
  const auto removal = remove_outliers(with, 22, 0.25);
  CHECK(removal.kept.n() == 48);

  // Appended points live in the expanded bounding box.
  const Matrix& base = gen.data.points();
  for (int j = 0; j < 2; ++j) {
    const double lo = base.col(j).minCoeff() - 10.0;
    const double hi = base.col(j).maxCoeff() + 10.0;
    for (int i = 50; i < 70; ++i) {
      CHECK(with.points()(i, j) >= lo);
      CHECK(with.points()(i, j) <= hi);
    }
  }
  // Most outliers fall outside the original bounding box.
  int outside = 0;
  for (int i = 50; i < 70; ++i) {
    bool out = false;
    for (int j = 0; j < 2; ++j) {
      if (with.points()(i, j) < base.col(j).minCoeff() ||
          with.points()(i, j) > base.col(j).maxCoeff()) {
        out = true;
      }
    }
    if (out) ++outside;
  }
  CHECK(outside >= 10);
}
