#pragma once

#include <json.hpp>

#include "stabcert/mapping.hpp"
#include "stabcert/solver.hpp"
#include "stabcert/types.hpp"

namespace stabcert {

enum class CertMethod { SdpKm, LpKm, SdpNcut, Ss2, Pairwise, Resilience };
enum class DistanceKind { Em, WeightedEm };

std::string to_string(CertMethod m);
std::string to_string(DistanceKind d);
std::string to_string(SolveStatus s);

/// A stability guarantee for a clustering. When valid, every clustering
/// whose loss is within `delta` of the certified one lies within earth-mover
/// distance `epsilon` (weighted for NCut). epsilon is always derived from
/// the certified dual bound kappa_lb, never the primal objective.
struct Certificate {
  CertMethod method = CertMethod::SdpKm;
  int n = 0;
  int K = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  double kappa_hat = 0.0;
  double kappa_lb = 0.0;
  double epsilon = 0.0;
  bool valid = false;
  double level = 0.0;
  double delta = 0.0;
  DistanceKind distance_kind = DistanceKind::Em;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  Residuals residuals;
  double wall_time_s = 0.0;
};

nlohmann::json to_json(const Certificate& c);

/// SS certificate over the K-means SDP cone at level <D, X(C)> + delta
/// (delta in <D, X> units, i.e. 2n times K-means loss units).
Certificate certify_kmeans_sdp(const Matrix& d, const Clustering& c,
                               double delta, const SolveOptions& o);

/// Same guarantee over the LP relaxation polytope.
Certificate certify_kmeans_lp(const Matrix& d, const Clustering& c,
                              double delta, const SolveOptions& o);

/// SS certificate over the NCut SDP cone at level <L, X(C)> + delta; sizes
/// are degree-weighted and the distance is the weighted earth mover's.
Certificate certify_ncut_sdp(const SimilarityGraph& g, const Clustering& c,
                             double delta, const SolveOptions& o);

/// SS problem centered at the relaxation optimum X*; the earth-mover radius
/// doubles the Frobenius radius of the X*-centered ball.
struct Ss2Result {
  Certificate certificate;
  double eps_frobenius = 0.0;   // certified bound on max ||X* - X'||_F
  double relaxation_opt = 0.0;  // primal value of the relaxation solve
  Matrix center;                // X*
};
Ss2Result certify_ss2(const Matrix& loss, const Clustering& c,
                      ConeVariant cone, const SolveOptions& o, double delta = 0.0,
                      const Vector* degrees = nullptr);

/// Converts an SS optimum kappa into an earth-mover radius for the X,
/// X~ (indicator) and Z (orthonormal) mappings.
struct EpsilonResult {
  double epsilon = 0.0;
  bool valid = false;
};
EpsilonResult epsilon_from_kappa(ClusterMapping mapping, double kappa, int n,
                                 int K, const std::vector<int>& sizes,
                                 double p_min, double p_max);

/// Certifies that ALL pairs of clusterings within `alpha` of the relaxed
/// optimum are within epsilon = 8 (K - kappa_lb) p_max of each other. The
/// reference clustering supplies K, p_min and p_max.
Certificate pairwise_stability(const Matrix& loss, ConeVariant cone,
                               const Clustering& c, double alpha,
                               const SolveOptions& o,
                               const Vector* degrees = nullptr);

/// Resilience under alpha-dilations of pairwise distances for the K-means
/// loss. alpha_s is the largest level slack with a valid pairwise
/// certificate, found by bisection; the loss is lambda-Lipschitz in D.
struct ResilienceResult {
  bool resilient = false;
  double alpha_s = 0.0;
  double eps_res = 0.0;
  Certificate certificate;  // pairwise certificate at the certified slack
};
ResilienceResult resilience_certificate(const Matrix& d, const Clustering& c,
                                        double lambda_lip, double alpha,
                                        const SolveOptions& o);

}  // namespace stabcert
