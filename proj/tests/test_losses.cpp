#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "stabcert/eig.hpp"
#include "stabcert/losses.hpp"
#include "stabcert/mapping.hpp"
#include "stabcert/rng.hpp"

using namespace stabcert;

namespace {

Dataset random_points(int n, int d, Rng* rng, double scale = 2.0) {
  Matrix p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = rng->uniform(-scale, scale);
  return Dataset(std::move(p));
}

}  // namespace

TEST_CASE("squared distance matrix") {
  Matrix p(2, 2);
  p << 0, 0, 3, 4;
  const Matrix d = squared_distance_matrix(Dataset(p));
  CHECK(d(0, 1) == doctest::Approx(25.0));
  CHECK(d(1, 0) == doctest::Approx(25.0));
  CHECK(d(0, 0) == 0.0);

  const Matrix single = squared_distance_matrix(Dataset(Matrix::Zero(1, 1)));
  CHECK(single(0, 0) == 0.0);

  Rng rng(3);
  const Dataset ds = random_points(5, 3, &rng);
  const Matrix dd = squared_distance_matrix(ds);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m) {
        const double diff = ds.points()(i, m) - ds.points()(j, m);
        s += diff * diff;
      }
      CHECK(dd(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  }
}

TEST_CASE("kmeans loss examples") {
  Matrix p(2, 1);
  p << 0, 2;
  const Dataset ds(p);
  CHECK(kmeans_loss(ds, Clustering({0, 0}, 1)) == doctest::Approx(1.0));
  CHECK(kmeans_loss(ds, Clustering({0, 1}, 2)) == doctest::Approx(0.0));

  const Matrix d = squared_distance_matrix(ds);
  const Matrix x = materialize(ClusterMapping::Membership, Clustering({0, 0}, 1));
  CHECK(kmeans_loss_matrix(d, x) == doctest::Approx(1.0));
  CHECK(kmeans_loss_matrix(d, Matrix::Zero(2, 2)) == doctest::Approx(0.0));
}

TEST_CASE("kmeans loss centroid form equals matrix form") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const int K = rng.uniform_int(1, std::min(3, n));
    const Dataset ds = random_points(n, rng.uniform_int(1, 4), &rng);
    const Clustering c(oracles::random_labels(n, K, &rng), K);
    const Matrix d = squared_distance_matrix(ds);
    const Matrix x = materialize(ClusterMapping::Membership, c);
    CHECK(kmeans_loss(ds, c) ==
          doctest::Approx(kmeans_loss_matrix(d, x)).epsilon(1e-9));
  }
}

TEST_CASE("kmeans loss is label-permutation invariant") {
  Rng rng(19);
  const Dataset ds = random_points(8, 2, &rng);
  const Clustering c(oracles::random_labels(8, 3, &rng), 3);
  std::vector<int> swapped(c.labels());
  for (int& v : swapped) v = (v + 1) % 3;
  CHECK(kmeans_loss(ds, c) ==
        doctest::Approx(kmeans_loss(ds, Clustering(swapped, 3))));
}

TEST_CASE("ncut loss examples") {
  // Two disconnected triangles.
  Matrix w = Matrix::Zero(6, 6);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) w(3 * b + i, 3 * b + j) = 1.0;
  const SimilarityGraph g(w);
  CHECK(ncut_loss(g, Clustering({0, 0, 0, 1, 1, 1}, 2)) == doctest::Approx(0.0));

  // Complete graph on 4 nodes, equal split: cut 4, volume 6 per side.
  Matrix k4 = Matrix::Ones(4, 4);
  k4.diagonal().setZero();
  CHECK(ncut_loss(SimilarityGraph(k4), Clustering({0, 0, 1, 1}, 2)) ==
        doctest::Approx(4.0 / 3.0));
}

TEST_CASE("ncut loss equals laplacian inner product") {
  Rng rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = rng.uniform_int(3, 9);
    const int K = rng.uniform_int(2, 3);
    if (K > n) continue;
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        w(i, j) = (i == j) ? 0.0 : rng.uniform(0.05, 1.0);
        w(j, i) = w(i, j);
      }
    }
    const SimilarityGraph g(std::move(w));
    const Clustering c(oracles::random_labels(n, K, &rng), K);
    const Matrix l = normalized_laplacian(g);
    const Vector& degrees = g.degrees();
    const double via_matrix = blockwise_inner(c, l, ClusterMapping::NCut, &degrees);
    CHECK(ncut_loss(g, c) == doctest::Approx(via_matrix).epsilon(1e-9));
  }
}

TEST_CASE("normalized laplacian") {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  const Matrix l = normalized_laplacian(SimilarityGraph(w));
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(0, 1) == doctest::Approx(-1.0));

  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(2, 12);
    Matrix ww(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        ww(i, j) = (i == j) ? 0.0 : rng.uniform(0.1, 2.0);
        ww(j, i) = ww(i, j);
      }
    const SimilarityGraph g(std::move(ww));
    const Matrix lap = normalized_laplacian(g);
    const Vector sw = g.degrees().cwiseSqrt();
    CHECK((lap * sw).cwiseAbs().maxCoeff() <= 1e-10);
    const auto eig = stabcert::symmetric_eig(lap);
    CHECK(eig.values.minCoeff() >= -1e-8);
    CHECK(eig.values.maxCoeff() <= 2.0 + 1e-8);
  }
}

TEST_CASE("self loops count in degrees and assoc") {
  Matrix w(3, 3);
  w << 1.0, 0.5, 0.0,
       0.5, 0.0, 0.5,
       0.0, 0.5, 0.0;
  const SimilarityGraph g(w);
  CHECK(g.degrees()(0) == doctest::Approx(1.5));
  // Cluster {0,1} vs {2}: cut = 0.5 both ways.
  const double loss = ncut_loss(g, Clustering({0, 0, 1}, 2));
  const double vol0 = 1.5 + 1.0;
  CHECK(loss == doctest::Approx(0.5 / vol0 + 0.5 / 0.5));
}
