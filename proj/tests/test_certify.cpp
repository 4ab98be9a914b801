#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stabcert/certify.hpp"
#include "stabcert/losses.hpp"
#include "stabcert/metrics.hpp"
#include "stabcert/rng.hpp"
#include "stabcert/synth.hpp"

using namespace stabcert;

namespace {

Dataset triplets() {
  Matrix p(6, 1);
  p << 0.0, 0.1, 0.2, 10.0, 10.1, 10.2;
  return Dataset(p);
}

Dataset unit_square() {
  Matrix p(4, 2);
  p << 0, 0, 1, 0, 0, 1, 1, 1;
  return Dataset(p);
}

const Clustering kTriplets({0, 0, 0, 1, 1, 1}, 2);
const Clustering kLeftRight({0, 1, 0, 1}, 2);

}  // namespace

TEST_CASE("triplets: SDP certificate is valid and tight") {
  const Matrix d = squared_distance_matrix(triplets());
  const Certificate cert = certify_kmeans_sdp(d, kTriplets, 0.0, SolveOptions{});
  CHECK(cert.valid);
  CHECK(cert.epsilon < 1e-3);
  CHECK(cert.p_min == doctest::Approx(0.5));
  CHECK(cert.status == SolveStatus::Converged);

  // Soundness by enumeration: every clustering in the sublevel set is within
  // epsilon of the certified one.
  enumerate_partitions(6, 2, [&](const Clustering& cp) {
    if (blockwise_inner(cp, d, ClusterMapping::Membership) <= cert.level) {
      CHECK(em_distance(kTriplets, cp) <= cert.epsilon + 1e-12);
    }
  });
}

TEST_CASE("triplets: LP certificate is valid") {
  const Matrix d = squared_distance_matrix(triplets());
  const Certificate cert = certify_kmeans_lp(d, kTriplets, 0.0, SolveOptions{});
  CHECK(cert.valid);
  CHECK(cert.epsilon < 1e-2);
}

TEST_CASE("LP kappa lower-bounds all sublevel-set clusterings") {
  Rng rng(15);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = rng.uniform_int(5, 8);
    const int K = 2;
    Matrix pts(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) pts(i, j) = rng.uniform(-2, 2);
    const Matrix d = squared_distance_matrix(Dataset(pts));
    const Clustering c(oracles::random_labels(n, K, &rng), K);
    const Certificate cert = certify_kmeans_lp(d, c, 0.0, SolveOptions{});
    if (cert.status != SolveStatus::Converged) continue;
    enumerate_partitions(n, K, [&](const Clustering& cp) {
      if (blockwise_inner(cp, d, ClusterMapping::Membership) <= cert.level) {
        CHECK(cert.kappa_lb <= pair_inner(c, cp) + 1e-6);
      }
    });
  }
}

TEST_CASE("unit square: negative control is never valid") {
  const Matrix d = squared_distance_matrix(unit_square());
  const Certificate sdp = certify_kmeans_sdp(d, kLeftRight, 0.0, SolveOptions{});
  CHECK(!sdp.valid);
  const Certificate lp = certify_kmeans_lp(d, kLeftRight, 0.0, SolveOptions{});
  CHECK(!lp.valid);
}

TEST_CASE("ncut: disconnected cliques certify at epsilon zero") {
  Matrix w = Matrix::Zero(6, 6);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) w(3 * b + i, 3 * b + j) = 1.0;
  const SimilarityGraph g(w);
  const Certificate cert =
      certify_ncut_sdp(g, Clustering({0, 0, 0, 1, 1, 1}, 2), 0.0, SolveOptions{});
  CHECK(cert.valid);
  CHECK(cert.epsilon <= 1e-4);
  CHECK(cert.distance_kind == DistanceKind::WeightedEm);
}

TEST_CASE("ncut: complete graph is never valid") {
  Matrix w = Matrix::Ones(6, 6);
  w.diagonal().setZero();
  const SimilarityGraph g(w);
  const Certificate cert =
      certify_ncut_sdp(g, Clustering({0, 0, 0, 1, 1, 1}, 2), 0.0, SolveOptions{});
  CHECK(!cert.valid);
}

TEST_CASE("certificate json schema") {
  const Matrix d = squared_distance_matrix(triplets());
  const Certificate cert = certify_kmeans_sdp(d, kTriplets, 0.0, SolveOptions{});
  const auto j = to_json(cert);
  for (const char* key :
       {"method", "n", "K", "p_min", "p_max", "kappa_hat", "kappa_lb",
        "epsilon", "valid", "level", "delta", "distance_kind", "solver",
        "wall_time_s"}) {
    CHECK(j.contains(key));
  }
  for (const char* key : {"status", "iterations", "primal_res", "dual_res", "gap"}) {
    CHECK(j["solver"].contains(key));
  }
  CHECK(j["method"] == "SDP_KM");
  CHECK(j["valid"].is_boolean());
}

TEST_CASE("ss2 on triplets is valid; K=1 gives zero radius") {
  const Matrix d = squared_distance_matrix(triplets());
  const Ss2Result r =
      certify_ss2(d, kTriplets, ConeVariant::KMeansSdp, SolveOptions{});
  CHECK(r.certificate.valid);
  CHECK(r.certificate.method == CertMethod::Ss2);
  CHECK(r.eps_frobenius <= 0.05);

  const Ss2Result one =
      certify_ss2(d, Clustering({0, 0, 0, 0, 0, 0}, 1), ConeVariant::KMeansSdp,
                  SolveOptions{});
  CHECK(one.certificate.epsilon <= 1e-4);
}

TEST_CASE("ss2 frobenius doubling relation on random instances") {
  Rng rng(25);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = rng.uniform_int(6, 9);
    Matrix pts(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) pts(i, j) = rng.uniform(-2, 2);
    const Matrix d = squared_distance_matrix(Dataset(pts));
    const Clustering c(oracles::random_labels(n, 2, &rng), 2);

    const Certificate ss = certify_kmeans_sdp(d, c, 0.0, SolveOptions{});
    const Ss2Result ss2 =
        certify_ss2(d, c, ConeVariant::KMeansSdp, SolveOptions{});
    if (ss.status != SolveStatus::Converged ||
        ss2.certificate.status != SolveStatus::Converged) {
      continue;
    }
    const double eps_prime =
        std::sqrt(std::max(0.0, 2.0 * c.K() - 2.0 * ss.kappa_lb));
    CHECK(eps_prime <= 2.0 * ss2.eps_frobenius + 1e-4);
  }
}

TEST_CASE("epsilon_from_kappa conversions") {
  // X mapping at kappa = K.
  const auto x = epsilon_from_kappa(ClusterMapping::Membership, 2.0, 8, 2,
                                    {4, 4}, 0.5, 0.5);
  CHECK(x.epsilon == doctest::Approx(0.0));
  CHECK(x.valid);

  // Z mapping at kappa = sqrt(2K).
  const auto z = epsilon_from_kappa(ClusterMapping::Orthonormal, std::sqrt(4.0),
                                    8, 2, {4, 4}, 0.5, 0.5);
  CHECK(z.epsilon == doctest::Approx(0.0));

  // Indicator mapping, equal sizes n=8 K=2, kappa = sum n_k^2 = 32:
  // (32 + 49 + 1 - 64) / (2 * 64 * 0.5) = 18 / 64.
  const auto xt = epsilon_from_kappa(ClusterMapping::Indicator, 32.0, 8, 2,
                                     {4, 4}, 0.5, 0.5);
  CHECK(xt.epsilon == doctest::Approx(0.28125));
  CHECK(xt.valid);

  CHECK_THROWS(epsilon_from_kappa(ClusterMapping::NCut, 1.0, 4, 2, {2, 2}, 0.5, 0.5));
}

TEST_CASE("pairwise stability") {
  const Matrix d = squared_distance_matrix(triplets());
  const Certificate tight =
      pairwise_stability(d, ConeVariant::KMeansSdp, kTriplets, 1e-3, SolveOptions{});
  CHECK(tight.valid);
  CHECK(tight.epsilon <= 0.1);
  CHECK(tight.method == CertMethod::Pairwise);

  const Certificate loose =
      pairwise_stability(d, ConeVariant::KMeansSdp, kTriplets, 1e4, SolveOptions{});
  CHECK(!loose.valid);

  // Monotone in alpha over a grid (certified radius can only grow).
  double prev = -1.0;
  for (double alpha : {0.01, 1.0, 50.0}) {
    const Certificate cert =
        pairwise_stability(d, ConeVariant::KMeansSdp, kTriplets, alpha, SolveOptions{});
    CHECK(cert.epsilon >= prev - 1e-4);
    prev = cert.epsilon;
  }
}

TEST_CASE("pairwise certificates cover all sublevel pairs") {
  Rng rng(35);
  const Dataset ds = triplets();
  const Matrix d = squared_distance_matrix(ds);
  const Certificate cert =
      pairwise_stability(d, ConeVariant::KMeansSdp, kTriplets, 0.5, SolveOptions{});
  REQUIRE(cert.valid);
  std::vector<Clustering> inside;
  enumerate_partitions(6, 2, [&](const Clustering& cp) {
    if (blockwise_inner(cp, d, ClusterMapping::Membership) <= cert.level) {
      inside.push_back(cp);
    }
  });
  for (const auto& a : inside) {
    for (const auto& b : inside) {
      CHECK(em_distance(a, b) <= cert.epsilon + 1e-12);
    }
  }
}

TEST_CASE("resilience") {
  const Matrix d = squared_distance_matrix(triplets());
  // Loss <D, X> is sqrt(K)-Lipschitz in D over the cone.
  const double lambda = std::sqrt(2.0);
  const ResilienceResult small =
      resilience_certificate(d, kTriplets, lambda, 1e-4, SolveOptions{});
  CHECK(small.resilient);
  CHECK(small.alpha_s > 0.0);
  CHECK(small.eps_res <= small.alpha_s);

  const Matrix sq = squared_distance_matrix(unit_square());
  const ResilienceResult never =
      resilience_certificate(sq, kLeftRight, lambda, 0.5, SolveOptions{});
  CHECK(!never.resilient);
  CHECK(never.alpha_s <= 1e-9);

  // alpha_s never exceeds the bisection bracket.
  CHECK(small.alpha_s <=
        blockwise_inner(kTriplets, d, ClusterMapping::Membership) + 1e-12);
}

TEST_CASE("epsilon grows with delta") {
  const Matrix d = squared_distance_matrix(triplets());
  double prev = -1.0;
  for (double delta : {0.0, 1.0, 10.0, 60.0}) {
    const Certificate cert = certify_kmeans_sdp(d, kTriplets, delta, SolveOptions{});
    CHECK(cert.epsilon >= prev - 1e-5);
    prev = cert.epsilon;
  }
}

TEST_CASE("invalid arguments") {
  const Matrix d = squared_distance_matrix(triplets());
  CHECK_THROWS(certify_kmeans_sdp(d, kTriplets, -1.0, SolveOptions{}));
  CHECK_THROWS(pairwise_stability(d, ConeVariant::KMeansSdp, kTriplets, 0.0,
                                  SolveOptions{}));
  CHECK_THROWS(resilience_certificate(d, kTriplets, 0.0, 0.5, SolveOptions{}));
}
