#include "stabcert/population.hpp"

#include <cmath>

#include "stabcert/certify.hpp"
#include "stabcert/mapping.hpp"

namespace stabcert {

UniformDeviationBound constant_over_sqrt_n(double c) {
  if (c < 0.0) throw std::invalid_argument("psi constant must be nonnegative");
  UniformDeviationBound out;
  out.psi = [c](int n, double) { return c / std::sqrt(static_cast<double>(n)); };
  out.provenance = "demo constant-over-sqrt(n), not a proven bound";
  return out;
}

double em_sampling_deviation(int n, double delta) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (delta <= 0.0 || delta > 1.0) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
  return std::sqrt(std::log(4.0 / delta) / (2.0 * n));
}

nlohmann::json to_json(const TestOutcome& t) {
  return nlohmann::json{
      {"reject", t.reject},
      {"epsilon", t.epsilon},
      {"delta", t.delta},
      {"Delta", t.Delta},
      {"psi_value", t.psi_value},
      {"inflated_level", t.inflated_level},
      {"kappa_lb", t.kappa_lb},
      {"sampling_term", t.sampling_term},
  };
}

TestOutcome stability_test(const Matrix& d, const Clustering& c, double Delta,
                           double delta, const UniformDeviationBound& psi,
                           const SolveOptions& o) {
  if (Delta < 0.0) throw std::invalid_argument("Delta must be nonnegative");
  if (!psi.psi) throw std::invalid_argument("psi bound is required");
  TestOutcome out;
  out.delta = delta;
  out.Delta = Delta;
  out.sampling_term = em_sampling_deviation(c.n(), delta);
  out.psi_value = psi.psi(c.n(), delta / 2.0);
  if (out.psi_value < 0.0) {
    throw std::invalid_argument("psi must be nonnegative");
  }

  // Loss-unit slack Delta + 2 psi(n, delta/2); <D, X> units are 2n times
  // K-means loss units.
  const double slack = 2.0 * c.n() * (Delta + 2.0 * out.psi_value);
  const Certificate cert = certify_kmeans_sdp(d, c, slack, o);
  out.inflated_level = cert.level;
  out.kappa_lb = cert.kappa_lb;
  out.status = cert.status;

  const double margin = cert.epsilon;  // (K - kappa_lb) p_max
  out.epsilon = 2.0 * (margin + out.sampling_term);
  out.reject = cert.status == SolveStatus::Converged && margin <= cert.p_min;
  return out;
}

}  // namespace stabcert
