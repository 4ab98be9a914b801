#pragma once

#include <functional>
#include <json.hpp>
#include <string>

#include "stabcert/solver.hpp"
#include "stabcert/types.hpp"

namespace stabcert {

/// Uniform deviation bound between sample and population K-means loss:
/// psi(n, delta) bounds the sup-norm deviation with probability 1 - delta.
/// The bound is supplied by the caller; it must be nonincreasing in n and
/// in delta.
struct UniformDeviationBound {
  std::function<double(int, double)> psi;
  std::string provenance;
};

/// Demo bound psi(n, delta) = c / sqrt(n). This is a placeholder shape for
/// experimentation, not a proven deviation bound; real applications should
/// supply a constant derived from the data distribution's support or
/// moments.
UniformDeviationBound constant_over_sqrt_n(double c);

/// sqrt(log(4/delta) / (2n)): deviation of the empirical earth-mover
/// distance from its population value.
double em_sampling_deviation(int n, double delta);

/// Outcome of the population-instability hypothesis test. `reject` means
/// the sample certifies (Delta, epsilon)-stability strongly enough to
/// reject instability of the population optimum at level delta.
struct TestOutcome {
  bool reject = false;
  double epsilon = 0.0;
  double delta = 0.0;     // confidence parameter
  double Delta = 0.0;     // excess-loss tolerance, in K-means loss units
  double psi_value = 0.0;
  double inflated_level = 0.0;  // the <D, X> level handed to the solver
  double kappa_lb = 0.0;
  double sampling_term = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
};

nlohmann::json to_json(const TestOutcome& t);

/// Solves the K-means SS problem at loss slack Delta + 2 psi(n, delta/2)
/// (converted to <D, X> units) and rejects population instability when
/// (K - kappa_lb) p_max <= p_min. The reported radius is
/// 2 ((K - kappa_lb) p_max + sqrt(log(4/delta) / (2n))).
TestOutcome stability_test(const Matrix& d, const Clustering& c, double Delta,
                           double delta, const UniformDeviationBound& psi,
                           const SolveOptions& o);

}  // namespace stabcert
