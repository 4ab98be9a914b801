#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stabcert/certify.hpp"
#include "stabcert/losses.hpp"
#include "stabcert/population.hpp"
#include "stabcert/synth.hpp"

using namespace stabcert;

namespace {

Dataset triplets() {
  Matrix p(6, 1);
  p << 0.0, 0.1, 0.2, 10.0, 10.1, 10.2;
  return Dataset(p);
}

const Clustering kTriplets({0, 0, 0, 1, 1, 1}, 2);

UniformDeviationBound zero_psi() {
  UniformDeviationBound psi;
  psi.psi = [](int, double) { return 0.0; };
  psi.provenance = "test";
  return psi;
}

}  // namespace

TEST_CASE("em sampling deviation values") {
  CHECK(em_sampling_deviation(200, 0.05) ==
        doctest::Approx(std::sqrt(std::log(80.0) / 400.0)).epsilon(1e-12));
  CHECK(em_sampling_deviation(200, 0.05) == doctest::Approx(0.10467).epsilon(1e-3));
  // delta = 4 e^{-2} makes log(4/delta) = 2.
  const double special = 4.0 * std::exp(-2.0);
  CHECK(em_sampling_deviation(100, special) ==
        doctest::Approx(std::sqrt(1.0 / 100.0)).epsilon(1e-12));
  CHECK(em_sampling_deviation(400, 1.0) ==
        doctest::Approx(std::sqrt(std::log(4.0) / 800.0)));
  // Monotone decreasing in n.
  double prev = 1e9;
  for (int n : {10, 50, 100, 1000}) {
    const double v = em_sampling_deviation(n, 0.1);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS(em_sampling_deviation(0, 0.1));
  CHECK_THROWS(em_sampling_deviation(10, 0.0));
  CHECK_THROWS(em_sampling_deviation(10, 1.5));
}

TEST_CASE("stability test rejects on separated data") {
  const Matrix d = squared_distance_matrix(triplets());
  const double delta = 0.05;
  const TestOutcome t =
      stability_test(d, kTriplets, 0.0, delta, zero_psi(), SolveOptions{});
  CHECK(t.reject);
  CHECK(t.sampling_term == doctest::Approx(em_sampling_deviation(6, delta)));
  // kappa_lb ~ K makes the radius approach twice the sampling term.
  CHECK(t.epsilon == doctest::Approx(2.0 * t.sampling_term).epsilon(0.01));
  CHECK(t.psi_value == 0.0);
}

TEST_CASE("stability test does not reject the unit square") {
  Matrix p(4, 2);
  p << 0, 0, 1, 0, 0, 1, 1, 1;
  const Matrix d = squared_distance_matrix(Dataset(p));
  const TestOutcome t = stability_test(d, Clustering({0, 1, 0, 1}, 2), 0.0, 0.05,
                                       zero_psi(), SolveOptions{});
  CHECK(!t.reject);
}

TEST_CASE("reduction to the plain certificate at zero inflation") {
  const Matrix d = squared_distance_matrix(triplets());
  const TestOutcome t =
      stability_test(d, kTriplets, 0.0, 0.05, zero_psi(), SolveOptions{});
  const Certificate cert = certify_kmeans_sdp(d, kTriplets, 0.0, SolveOptions{});
  CHECK(t.reject == cert.valid);
  CHECK(t.inflated_level == doctest::Approx(cert.level));
  CHECK(t.kappa_lb == doctest::Approx(cert.kappa_lb).epsilon(1e-3));
}

TEST_CASE("larger psi never increases kappa") {
  const Matrix d = squared_distance_matrix(triplets());
  double prev = 1e300;
  for (double c : {0.0, 0.05, 0.5}) {
    const TestOutcome t = stability_test(d, kTriplets, 0.0, 0.1,
                                         constant_over_sqrt_n(c), SolveOptions{});
    CHECK(t.kappa_lb <= prev + 1e-5);
    prev = t.kappa_lb;
  }
}

TEST_CASE("psi demo bound shape") {
  const auto psi = constant_over_sqrt_n(2.0);
  CHECK(psi.psi(100, 0.1) == doctest::Approx(0.2));
  CHECK(psi.psi(400, 0.1) == doctest::Approx(0.1));
  CHECK(!psi.provenance.empty());
  CHECK_THROWS(constant_over_sqrt_n(-1.0));
}

TEST_CASE("test outcome json fields") {
  const Matrix d = squared_distance_matrix(triplets());
  const TestOutcome t =
      stability_test(d, kTriplets, 0.01, 0.1, constant_over_sqrt_n(0.1),
                     SolveOptions{});
  const auto j = to_json(t);
  for (const char* key : {"reject", "epsilon", "delta", "Delta", "psi_value",
                          "inflated_level", "kappa_lb", "sampling_term"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["Delta"] == doctest::Approx(0.01));
  CHECK(j["delta"] == doctest::Approx(0.1));
}

TEST_CASE("epsilon monotone nonincreasing in n for fixed inputs") {
  // Pure arithmetic consequence of the sampling term.
  const double kappa_margin = 0.05;  // (K - kappa) p_max held fixed
  double prev = 1e9;
  for (int n : {50, 100, 500}) {
    const double eps = 2.0 * (kappa_margin + em_sampling_deviation(n, 0.05));
    CHECK(eps < prev);
    prev = eps;
  }
}
