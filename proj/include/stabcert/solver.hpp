#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "stabcert/types.hpp"

namespace stabcert {

/// Feasible-set variants for sublevel-set problems.
///   KMeansSdp: {X >= 0 (psd), trace X = K, X 1 = 1, X_ij >= 0}
///   NCutSdp:   {X >= 0 (psd), I - X >= 0 (psd), trace X = K,
///               X sqrt(w) = sqrt(w), X_ij >= 0}
///   KMeansLp:  {trace X = K, X 1 = 1, X_ij <= X_ii, X_ij in [0, 1]},
///              X a general (not necessarily symmetric) matrix
enum class ConeVariant { KMeansSdp, NCutSdp, KMeansLp };

inline constexpr double kNoLevel = std::numeric_limits<double>::infinity();

/// minimize <objective, X> over the cone, subject to <loss, X> <= level.
/// Set level = kNoLevel to drop the half-space (pure relaxation).
struct SSProblem {
  int n = 0;
  int K = 0;
  Matrix objective;
  Matrix loss;
  double level = kNoLevel;
  ConeVariant cone = ConeVariant::KMeansSdp;
  Vector degrees;  // NCutSdp only
};

struct TraceRecord {
  int iteration = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;
  double objective = 0.0;
};

struct SolveOptions {
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-5;  // duality-gap tolerance, relative to 1 + |kappa|
  int max_iter = 100000;
  double rho = 0.0;  // <= 0 selects the default penalty
  double over_relaxation = 1.7;
  std::function<void(const TraceRecord&)> trace;
  std::optional<Matrix> warm_start;
};

enum class SolveStatus { Converged, MaxIter, NumericalFailure };

struct Residuals {
  double primal = 0.0;  // worst absolute constraint violation of `solution`
  double dual = 0.0;    // consensus dual residual at exit
  double gap = 0.0;     // primal_obj - dual_lb
};

struct SolveResult {
  Matrix solution;
  double primal_obj = 0.0;  // <objective, solution>
  double dual_lb = 0.0;     // certified lower bound on the true optimum
  Residuals residuals;
  int iterations = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  std::string message;
};

/// Operator-splitting solve of an SS problem. The dual_lb field is assembled
/// from an exactly dual-feasible point, so it lower-bounds the true optimum
/// up to floating-point roundoff regardless of convergence quality.
SolveResult solve_ss(const SSProblem& p, const SolveOptions& o);

/// The plain relaxation: objective := loss, no half-space.
SolveResult solve_relaxation(const Matrix& loss, ConeVariant cone, int K,
                             const SolveOptions& o,
                             const Vector* degrees = nullptr);

// Projection subroutines of the splitting scheme, exposed for testing.

/// Projects a symmetric matrix onto {X = X^T, X v = v, trace X = K}.
Matrix project_affine_symmetric(const Matrix& s, const Vector& v, double K);

/// Projects a general matrix onto {X 1 = 1, trace X = K}.
Matrix project_affine_rows(const Matrix& s, double K);

/// Projects a general matrix onto {X_ij in [0,1], X_ij <= X_ii}, jointly over
/// each diagonal-anchored slice.
Matrix project_row_cap_box(const Matrix& s);

/// Projects onto the half-space {<m, X> <= level}.
Matrix project_halfspace(const Matrix& s, const Matrix& m, double level);

}  // namespace stabcert
