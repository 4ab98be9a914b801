#include "stabcert/certify.hpp"

#include <chrono>
#include <cmath>

#include "stabcert/losses.hpp"

namespace stabcert {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double clamp_kappa(double kappa, int K) {
  return std::clamp(kappa, 0.0, static_cast<double>(K));
}

void fill_solver_fields(Certificate* cert, const SolveResult& sol) {
  cert->kappa_hat = sol.primal_obj;
  cert->status = sol.status;
  cert->iterations = sol.iterations;
  cert->residuals = sol.residuals;
}

Certificate certify_membership_ss(CertMethod method, ConeVariant cone,
                                  const Matrix& loss, const Clustering& c,
                                  double delta, const SolveOptions& o,
                                  const Vector* degrees) {
  const auto start = Clock::now();
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  const ClusterMapping mapping = (cone == ConeVariant::NCutSdp)
                                     ? ClusterMapping::NCut
                                     : ClusterMapping::Membership;
  Certificate cert;
  cert.method = method;
  cert.n = c.n();
  cert.K = c.K();
  cert.delta = delta;
  const RelativeSizes sizes = (cone == ConeVariant::NCutSdp)
                                  ? c.relative_sizes(*degrees)
                                  : c.relative_sizes();
  cert.p_min = sizes.p_min;
  cert.p_max = sizes.p_max;
  cert.distance_kind = (cone == ConeVariant::NCutSdp) ? DistanceKind::WeightedEm
                                                      : DistanceKind::Em;

  SSProblem p;
  p.n = c.n();
  p.K = c.K();
  p.objective = materialize(mapping, c, degrees);
  p.loss = loss;
  p.level = blockwise_inner(c, loss, mapping, degrees) + delta;
  p.cone = cone;
  if (degrees != nullptr) p.degrees = *degrees;
  cert.level = p.level;

  SolveOptions opts = o;
  if (!opts.warm_start.has_value() && cone != ConeVariant::KMeansLp) {
    opts.warm_start = p.objective;  // X(C) is feasible for its own level
  }
  const SolveResult sol = solve_ss(p, opts);
  fill_solver_fields(&cert, sol);
  cert.kappa_lb = sol.dual_lb;
  cert.epsilon = (cert.K - clamp_kappa(sol.dual_lb, cert.K)) * cert.p_max;
  cert.valid =
      sol.status == SolveStatus::Converged && cert.epsilon <= cert.p_min;
  cert.wall_time_s = seconds_since(start);
  return cert;
}

}  // namespace

std::string to_string(CertMethod m) {
  switch (m) {
    case CertMethod::SdpKm: return "SDP_KM";
    case CertMethod::LpKm: return "LP_KM";
    case CertMethod::SdpNcut: return "SDP_NCUT";
    case CertMethod::Ss2: return "SS2";
    case CertMethod::Pairwise: return "PAIRWISE";
    case CertMethod::Resilience: return "RESILIENCE";
  }
  return "?";
}

std::string to_string(DistanceKind d) {
  return d == DistanceKind::Em ? "EM" : "weighted-EM";
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

nlohmann::json to_json(const Certificate& c) {
  return nlohmann::json{
      {"method", to_string(c.method)},
      {"n", c.n},
      {"K", c.K},
      {"p_min", c.p_min},
      {"p_max", c.p_max},
      {"kappa_hat", c.kappa_hat},
      {"kappa_lb", c.kappa_lb},
      {"epsilon", c.epsilon},
      {"valid", c.valid},
      {"level", c.level},
      {"delta", c.delta},
      {"distance_kind", to_string(c.distance_kind)},
      {"solver",
       {{"status", to_string(c.status)},
        {"iterations", c.iterations},
        {"primal_res", c.residuals.primal},
        {"dual_res", c.residuals.dual},
        {"gap", c.residuals.gap}}},
      {"wall_time_s", c.wall_time_s},
  };
}

Certificate certify_kmeans_sdp(const Matrix& d, const Clustering& c,
                               double delta, const SolveOptions& o) {
  return certify_membership_ss(CertMethod::SdpKm, ConeVariant::KMeansSdp, d, c,
                               delta, o, nullptr);
}

Certificate certify_kmeans_lp(const Matrix& d, const Clustering& c,
                              double delta, const SolveOptions& o) {
  return certify_membership_ss(CertMethod::LpKm, ConeVariant::KMeansLp, d, c,
                               delta, o, nullptr);
}

Certificate certify_ncut_sdp(const SimilarityGraph& g, const Clustering& c,
                             double delta, const SolveOptions& o) {
  if (c.n() != g.n()) throw DimensionError("clustering size must match graph");
  const Matrix l = normalized_laplacian(g);
  const Vector& degrees = g.degrees();
  return certify_membership_ss(CertMethod::SdpNcut, ConeVariant::NCutSdp, l, c,
                               delta, o, &degrees);
}

Ss2Result certify_ss2(const Matrix& loss, const Clustering& c,
                      ConeVariant cone, const SolveOptions& o, double delta,
                      const Vector* degrees) {
  const auto start = Clock::now();
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  const ClusterMapping mapping = (cone == ConeVariant::NCutSdp)
                                     ? ClusterMapping::NCut
                                     : ClusterMapping::Membership;
  Ss2Result out;
  Certificate& cert = out.certificate;
  cert.method = CertMethod::Ss2;
  cert.n = c.n();
  cert.K = c.K();
  cert.delta = delta;
  const RelativeSizes sizes = (cone == ConeVariant::NCutSdp)
                                  ? c.relative_sizes(*degrees)
                                  : c.relative_sizes();
  cert.p_min = sizes.p_min;
  cert.p_max = sizes.p_max;
  cert.distance_kind = (cone == ConeVariant::NCutSdp) ? DistanceKind::WeightedEm
                                                      : DistanceKind::Em;

  const SolveResult relax = solve_relaxation(loss, cone, c.K(), o, degrees);
  out.relaxation_opt = relax.primal_obj;
  out.center = relax.solution;
  if (relax.status == SolveStatus::NumericalFailure) {
    fill_solver_fields(&cert, relax);
    cert.wall_time_s = seconds_since(start);
    return out;
  }

  SSProblem p;
  p.n = c.n();
  p.K = c.K();
  p.objective = relax.solution;
  p.loss = loss;
  p.level = blockwise_inner(c, loss, mapping, degrees) + delta;
  p.cone = cone;
  if (degrees != nullptr) p.degrees = *degrees;
  cert.level = p.level;

  SolveOptions opts = o;
  if (!opts.warm_start.has_value() && cone != ConeVariant::KMeansLp) {
    opts.warm_start = relax.solution;
  }
  const SolveResult sol = solve_ss(p, opts);
  fill_solver_fields(&cert, sol);
  cert.kappa_lb = sol.dual_lb;

  // max ||X* - X'||^2 <= ||X*||^2 + K - 2 kappa over the sublevel set, since
  // every feasible X' has ||X'||^2 <= K.
  const double center_norm2 = relax.solution.squaredNorm();
  const double frob2 =
      std::max(0.0, center_norm2 + cert.K - 2.0 * sol.dual_lb);
  out.eps_frobenius = std::sqrt(frob2);
  // Any two points of the sublevel set are within 2 eps_frobenius, so the
  // earth-mover radius follows with (1/2)(2 eps)^2 = 2 eps^2.
  cert.epsilon = 2.0 * frob2 * cert.p_max;
  cert.valid = sol.status == SolveStatus::Converged &&
               relax.status == SolveStatus::Converged &&
               cert.epsilon <= cert.p_min;
  cert.wall_time_s = seconds_since(start);
  return out;
}

EpsilonResult epsilon_from_kappa(ClusterMapping mapping, double kappa, int n,
                                 int K, const std::vector<int>& sizes,
                                 double p_min, double p_max) {
  EpsilonResult out;
  switch (mapping) {
    case ClusterMapping::Membership:
      out.epsilon = (K - std::clamp(kappa, 0.0, static_cast<double>(K))) * p_max;
      break;
    case ClusterMapping::Orthonormal: {
      const double cap = std::sqrt(2.0 * K);
      const double k2 = std::clamp(kappa, 0.0, cap);
      out.epsilon = (K - k2 * k2 / 2.0) * p_max;
      break;
    }
    case ClusterMapping::Indicator: {
      double sum_sq = 0.0;
      for (int sk : sizes) sum_sq += static_cast<double>(sk) * sk;
      const double span = static_cast<double>(n) - K + 1.0;
      const double numer = sum_sq + span * span + (K - 1.0) - 2.0 * kappa;
      out.epsilon = std::max(0.0, numer) /
                    (2.0 * static_cast<double>(n) * n * p_min);
      break;
    }
    case ClusterMapping::NCut:
      throw std::invalid_argument(
          "use the X mapping conversion for NCut certificates");
  }
  out.valid = out.epsilon <= p_min;
  return out;
}

Certificate pairwise_stability(const Matrix& loss, ConeVariant cone,
                               const Clustering& c, double alpha,
                               const SolveOptions& o, const Vector* degrees) {
  const auto start = Clock::now();
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  Certificate cert;
  cert.method = CertMethod::Pairwise;
  cert.n = c.n();
  cert.K = c.K();
  cert.delta = alpha;
  const RelativeSizes sizes = (cone == ConeVariant::NCutSdp)
                                  ? c.relative_sizes(*degrees)
                                  : c.relative_sizes();
  cert.p_min = sizes.p_min;
  cert.p_max = sizes.p_max;
  cert.distance_kind = (cone == ConeVariant::NCutSdp) ? DistanceKind::WeightedEm
                                                      : DistanceKind::Em;

  const SolveResult relax = solve_relaxation(loss, cone, c.K(), o, degrees);
  if (relax.status == SolveStatus::NumericalFailure) {
    fill_solver_fields(&cert, relax);
    cert.wall_time_s = seconds_since(start);
    return cert;
  }

  SSProblem p;
  p.n = c.n();
  p.K = c.K();
  p.objective = relax.solution;
  p.loss = loss;
  p.level = relax.primal_obj + alpha;
  p.cone = cone;
  if (degrees != nullptr) p.degrees = *degrees;
  cert.level = p.level;

  SolveOptions opts = o;
  if (!opts.warm_start.has_value() && cone != ConeVariant::KMeansLp) {
    opts.warm_start = relax.solution;
  }
  const SolveResult sol = solve_ss(p, opts);
  fill_solver_fields(&cert, sol);
  cert.kappa_lb = sol.dual_lb;
  cert.epsilon =
      8.0 * (cert.K - clamp_kappa(sol.dual_lb, cert.K)) * cert.p_max;
  cert.valid = sol.status == SolveStatus::Converged &&
               relax.status == SolveStatus::Converged &&
               cert.epsilon <= cert.p_min;
  cert.wall_time_s = seconds_since(start);
  return cert;
}

ResilienceResult resilience_certificate(const Matrix& d, const Clustering& c,
                                        double lambda_lip, double alpha,
                                        const SolveOptions& o) {
  if (lambda_lip <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");

  ResilienceResult out;
  const double level_cap = blockwise_inner(c, d, ClusterMapping::Membership);

  // The relaxation is shared across all bisection probes.
  const SolveResult relax =
      solve_relaxation(d, ConeVariant::KMeansSdp, c.K(), o);
  const RelativeSizes sizes = c.relative_sizes();
  const auto probe = [&](double slack) {
    Certificate cert;
    cert.method = CertMethod::Pairwise;
    cert.n = c.n();
    cert.K = c.K();
    cert.delta = slack;
    cert.p_min = sizes.p_min;
    cert.p_max = sizes.p_max;
    SSProblem p;
    p.n = c.n();
    p.K = c.K();
    p.objective = relax.solution;
    p.loss = d;
    p.level = relax.primal_obj + slack;
    p.cone = ConeVariant::KMeansSdp;
    cert.level = p.level;
    SolveOptions opts = o;
    opts.warm_start = relax.solution;
    const SolveResult sol = solve_ss(p, opts);
    fill_solver_fields(&cert, sol);
    cert.kappa_lb = sol.dual_lb;
    cert.epsilon =
        8.0 * (cert.K - clamp_kappa(sol.dual_lb, cert.K)) * cert.p_max;
    cert.valid = sol.status == SolveStatus::Converged &&
                 relax.status == SolveStatus::Converged &&
                 cert.epsilon <= cert.p_min;
    return cert;
  };

  // Bisection for the largest slack with a valid pairwise certificate over
  // the bracket (0, <D, X(C)>].
  double lo = 0.0;
  double hi = std::max(level_cap, 1e-12);
  Certificate hi_cert = probe(hi);
  if (hi_cert.valid) {
    out.alpha_s = hi;
    out.certificate = hi_cert;
  } else {
    Certificate best;
    bool have_best = false;
    for (int it = 0; it < 20 && (hi - lo) > 1e-3 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      Certificate cert = probe(mid);
      if (cert.valid) {
        lo = mid;
        best = cert;
        have_best = true;
      } else {
        hi = mid;
      }
    }
    out.alpha_s = lo;
    out.certificate = have_best ? best : hi_cert;
  }
  out.certificate.method = CertMethod::Resilience;

  // Distances dilate by (1+alpha), so squared distances dilate by
  // (1+alpha')^2 with alpha' = sqrt(1+alpha) - 1.
  const double alpha_sq = std::sqrt(1.0 + alpha) - 1.0;
  out.eps_res = 2.0 * alpha_sq * lambda_lip * d.norm();
  out.resilient = out.alpha_s > 0.0 && out.eps_res <= out.alpha_s;
  out.certificate.valid = out.resilient;
  out.certificate.epsilon = out.eps_res;
  out.certificate.delta = alpha;
  out.certificate.level = out.alpha_s;
  return out;
}

}  // namespace stabcert
