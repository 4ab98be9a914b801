#include "stabcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stabcert/eig.hpp"

namespace stabcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Block { Psd, SpectralUb, Nonneg, AffineSym, AffineRows, RowCapBox, HalfSpace };

struct Scaled {
  Matrix a;           // objective, scaled by 1/max|A_ij|
  double a_scale = 1; // multiplier restoring original objective units
  Matrix m;           // loss, scaled by 1/max|M_ij|
  double level = 0;   // scaled level
  double m_norm2 = 0;
  bool has_halfspace = false;
  Vector v;           // ones for K-means, sqrt(degrees) for NCut
  double K = 0;
  int n = 0;
  ConeVariant cone = ConeVariant::KMeansSdp;
};

std::vector<Block> block_list(const Scaled& w) {
  std::vector<Block> blocks;
  switch (w.cone) {
    case ConeVariant::KMeansSdp:
      blocks = {Block::Psd, Block::Nonneg, Block::AffineSym};
      break;
    case ConeVariant::NCutSdp:
      blocks = {Block::Psd, Block::SpectralUb, Block::Nonneg, Block::AffineSym};
      break;
    case ConeVariant::KMeansLp:
      blocks = {Block::RowCapBox, Block::AffineRows};
      break;
  }
  if (w.has_halfspace) blocks.push_back(Block::HalfSpace);
  return blocks;
}

// Solves the arrow-shaped normal equations of the constraint set
// {X v = v-ish, trace X = K} in symmetric matrix space:
//   (1/2)(nu lambda + (v'lambda) v) + mu v = g,   v'lambda + n mu = h.
void arrow_solve_symmetric(const Vector& v, const Vector& g, double h,
                           Vector* lambda, double* mu) {
  const auto n = v.size();
  const double nu = v.squaredNorm();
  const double vg = v.dot(g);
  *mu = (h - vg / nu) / (n - 1);
  const double lam_sum = vg / nu - *mu;  // v' lambda
  *lambda = (2.0 / nu) * (g - (lam_sum / 2.0 + *mu) * v);
}

// General-matrix analogue for row-sum plus trace constraints:
//   n lambda + mu 1 = g,   1'lambda + n mu = h.
void arrow_solve_rows(Eigen::Index n, const Vector& g, double h, Vector* lambda,
                      double* mu) {
  *mu = (h - g.sum() / n) / (n - 1);
  *lambda = (g.array() - *mu).matrix() / static_cast<double>(n);
}

Matrix rank_one_sym(const Vector& lambda, const Vector& v) {
  return 0.5 * (lambda * v.transpose() + v * lambda.transpose());
}

// Joint projection of one diagonal-anchored slice onto
// {x_j in [0, c], c in [0, 1]} where c is the diagonal entry. The objective
// phi(c) is convex piecewise-quadratic; its root is found by a descending
// scan over the off-diagonal values that could exceed c.
void project_cap_slice(Eigen::RowVectorXd& row, int diag_index) {
  const auto n = row.size();
  const double yd = row(diag_index);
  std::vector<double> above;
  above.reserve(n - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != diag_index && row(j) > 0.0) above.push_back(row(j));
  }
  std::sort(above.begin(), above.end(), std::greater<double>());
  double c = yd;
  double prefix = yd;
  for (std::size_t p = 0; p <= above.size(); ++p) {
    const double cand = prefix / (1.0 + p);
    const double hi = (p == 0) ? kInf : above[p - 1];
    const double lo = (p == above.size()) ? -kInf : above[p];
    if (cand <= hi && cand >= lo) {
      c = cand;
      break;
    }
    if (p < above.size()) prefix += above[p];
  }
  c = std::clamp(c, 0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    row(j) = (j == diag_index) ? c : std::clamp(row(j), 0.0, c);
  }
}

Matrix project_block(Block b, const Matrix& s, const Scaled& w) {
  switch (b) {
    case Block::Psd:
      return project_psd(s);
    case Block::SpectralUb:
      return clamp_spectrum(s, -kInf, 1.0);
    case Block::Nonneg:
      return s.cwiseMax(0.0);
    case Block::AffineSym:
      return project_affine_symmetric(s, w.v, w.K);
    case Block::AffineRows:
      return project_affine_rows(s, w.K);
    case Block::RowCapBox:
      return project_row_cap_box(s);
    case Block::HalfSpace:
      return project_halfspace(s, w.m, w.level);
  }
  throw std::logic_error("unreachable");
}

// Feasible interior point: v v'/|v|^2 + (K-1)/(n-1) (I - v v'/|v|^2).
Matrix default_start(const Scaled& w) {
  const int n = w.n;
  const double nu = w.v.squaredNorm();
  Matrix p1 = w.v * w.v.transpose() / nu;
  const double beta = (w.K - 1.0) / (n - 1.0);
  return p1 + beta * (Matrix::Identity(n, n) - p1);
}

// Builds an exactly dual-feasible point from the consensus multipliers and
// evaluates its objective, which lower-bounds the SS optimum by weak
// duality. Stationarity residuals are absorbed into the PSD dual (through a
// spectral shift compensated by the trace multiplier) or, for the LP cone,
// into the box dual whose support function is finite everywhere.
double assemble_dual_bound(const Scaled& w, const std::vector<Block>& blocks,
                           const std::vector<Matrix>& u, double rho) {
  const int n = w.n;
  Matrix y_aff = Matrix::Zero(n, n);
  Matrix n_dual = Matrix::Zero(n, n);
  Matrix s2;
  double t = 0.0;
  bool have_s2 = false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    switch (blocks[i]) {
      case Block::Psd:
      case Block::RowCapBox:
        break;  // remainder absorbers, defined by stationarity below
      case Block::SpectralUb:
        s2 = project_psd(rho * u[i]);
        have_s2 = true;
        break;
      case Block::Nonneg:
        n_dual = (-rho * u[i]).cwiseMax(0.0);
        break;
      case Block::AffineSym:
      case Block::AffineRows:
        y_aff = rho * u[i];
        break;
      case Block::HalfSpace:
        t = std::max(0.0, rho * (w.m.array() * u[i].array()).sum() / w.m_norm2);
        break;
    }
  }

  if (w.cone == ConeVariant::KMeansLp) {
    Vector lambda;
    double mu = 0.0;
    arrow_solve_rows(n, y_aff.rowwise().sum(), y_aff.trace(), &lambda, &mu);
    Matrix y_box = -w.a - lambda * Eigen::RowVectorXd::Ones(n);
    y_box.diagonal().array() -= mu;
    if (w.has_halfspace) y_box -= t * w.m;
    double sigma = 0.0;
    for (int i = 0; i < n; ++i) {
      double row_gain = y_box(i, i);
      for (int j = 0; j < n; ++j) {
        if (j != i) row_gain += std::max(0.0, y_box(i, j));
      }
      sigma += std::max(0.0, row_gain);
    }
    double bound = -sigma - lambda.sum() - mu * w.K;
    if (w.has_halfspace) bound -= t * w.level;
    return bound - 1e-12 * (1.0 + std::abs(bound) + w.a.norm());
  }

  Vector lambda;
  double mu = 0.0;
  Matrix y_sym = 0.5 * (y_aff + y_aff.transpose());
  arrow_solve_symmetric(w.v, y_sym * w.v, y_sym.trace(), &lambda, &mu);
  Matrix s = w.a - n_dual + rank_one_sym(lambda, w.v);
  s.diagonal().array() += mu;
  if (have_s2) s += s2;
  if (w.has_halfspace) s += t * w.m;
  const double lam_min = smallest_eigenvalue(s);
  const double shift = std::min(lam_min, 0.0) - 1e-11 * (1.0 + s.norm());
  double bound = -lambda.dot(w.v) - (mu - shift) * w.K;
  if (have_s2) bound -= s2.trace();
  if (w.has_halfspace) bound -= t * w.level;
  return bound - 1e-12 * (1.0 + std::abs(bound) + w.a.norm());
}

// Worst absolute violation of the original constraints by x. Half-space
// violations are measured in the scaled loss units used by the splitting.
double feasibility_violation(const Scaled& w, const Matrix& x) {
  double viol = 0.0;
  if (w.cone == ConeVariant::KMeansLp) {
    viol = std::max(viol, std::max(0.0, -x.minCoeff()));
    viol = std::max(viol, std::max(0.0, x.maxCoeff() - 1.0));
    for (int i = 0; i < w.n; ++i) {
      const double cap = x(i, i);
      for (int j = 0; j < w.n; ++j) {
        viol = std::max(viol, x(i, j) - cap);
      }
    }
    viol = std::max(viol, (x.rowwise().sum().array() - 1.0).abs().maxCoeff());
    viol = std::max(viol, std::abs(x.trace() - w.K));
  } else {
    viol = std::max(viol, std::max(0.0, -smallest_eigenvalue(x)));
    viol = std::max(viol, std::max(0.0, -x.minCoeff()));
    viol = std::max(viol, (x * w.v - w.v).cwiseAbs().maxCoeff());
    viol = std::max(viol, std::abs(x.trace() - w.K));
    if (w.cone == ConeVariant::NCutSdp) {
      const Matrix gap = Matrix::Identity(w.n, w.n) - x;
      viol = std::max(viol, std::max(0.0, -smallest_eigenvalue(gap)));
    }
  }
  if (w.has_halfspace) {
    viol = std::max(viol, std::max(0.0, (w.m.array() * x.array()).sum() - w.level));
  }
  return viol;
}

// Every feasible point of the SDP cones satisfies ||X||_F^2 <= K; shrink the
// iterate onto that ball so reported solutions obey the bound too.
Matrix polish(const Scaled& w, const Matrix& x) {
  if (w.cone == ConeVariant::KMeansLp) return x;
  const double r2 = x.squaredNorm();
  if (r2 > w.K && r2 > 0.0) return x * std::sqrt(w.K / r2);
  return x;
}

}  // namespace

Matrix project_affine_symmetric(const Matrix& s, const Vector& v, double K) {
  const auto n = s.rows();
  if (s.cols() != n) throw DimensionError("matrix must be square");
  if (v.size() != n) throw DimensionError("vector length must equal n");
  if (n == 1) return Matrix::Constant(1, 1, 1.0);
  Vector lambda;
  double mu = 0.0;
  arrow_solve_symmetric(v, s * v - v, s.trace() - K, &lambda, &mu);
  Matrix out = s - rank_one_sym(lambda, v);
  out.diagonal().array() -= mu;
  return out;
}

Matrix project_affine_rows(const Matrix& s, double K) {
  const auto n = s.rows();
  if (s.cols() != n) throw DimensionError("matrix must be square");
  if (n == 1) return Matrix::Constant(1, 1, 1.0);
  Vector lambda;
  double mu = 0.0;
  arrow_solve_rows(n, s.rowwise().sum() - Vector::Ones(n), s.trace() - K,
                   &lambda, &mu);
  Matrix out = s - lambda * Eigen::RowVectorXd::Ones(n);
  out.diagonal().array() -= mu;
  return out;
}

Matrix project_row_cap_box(const Matrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("matrix must be square");
  Matrix out = s;
  Eigen::RowVectorXd row;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    row = out.row(i);
    project_cap_slice(row, static_cast<int>(i));
    out.row(i) = row;
  }
  return out;
}

Matrix project_halfspace(const Matrix& s, const Matrix& m, double level) {
  if (m.rows() != s.rows() || m.cols() != s.cols()) {
    throw DimensionError("matrix shapes must match");
  }
  const double g = (m.array() * s.array()).sum();
  if (g <= level) return s;
  const double m2 = m.squaredNorm();
  if (m2 <= 0.0) throw std::invalid_argument("half-space normal is zero");
  return s - ((g - level) / m2) * m;
}

SolveResult solve_ss(const SSProblem& p, const SolveOptions& o) {
  if (p.n < 1 || p.K < 1 || p.K > p.n) {
    throw std::invalid_argument("require 1 <= K <= n");
  }
  if (p.objective.rows() != p.n || p.objective.cols() != p.n ||
      p.loss.rows() != p.n || p.loss.cols() != p.n) {
    throw DimensionError("objective and loss must be n x n");
  }

  Scaled w;
  w.n = p.n;
  w.K = p.K;
  w.cone = p.cone;
  w.a_scale = std::max(p.objective.norm(), 1e-300);
  w.a = p.objective / w.a_scale;
  w.has_halfspace = std::isfinite(p.level);
  const double m_scale = std::max(p.loss.cwiseAbs().maxCoeff(), 1e-300);
  w.m = p.loss / m_scale;
  w.level = w.has_halfspace ? p.level / m_scale : 0.0;
  w.m_norm2 = w.m.squaredNorm();
  if (p.cone == ConeVariant::NCutSdp) {
    if (p.degrees.size() != p.n || p.degrees.minCoeff() <= 0.0) {
      throw std::invalid_argument("NCut cone requires positive degrees");
    }
    w.v = p.degrees.cwiseSqrt();
  } else {
    w.v = Vector::Ones(p.n);
  }

  SolveResult res;
  if (p.n == 1) {
    res.solution = Matrix::Constant(1, 1, 1.0);
    if (w.has_halfspace && w.m(0, 0) > w.level + 1e-12) {
      res.status = SolveStatus::NumericalFailure;
      res.message = "level below the minimum attainable loss";
      return res;
    }
    const double v0 = p.objective(0, 0);
    res.primal_obj = v0;
    res.dual_lb = v0 - 1e-12 * (1.0 + std::abs(v0));
    res.status = SolveStatus::Converged;
    return res;
  }

  const std::vector<Block> blocks = block_list(w);
  const std::size_t m = blocks.size();
  Matrix x = o.warm_start.has_value() ? *o.warm_start : default_start(w);
  if (x.rows() != p.n || x.cols() != p.n) {
    throw DimensionError("warm start must be n x n");
  }
  std::vector<Matrix> z(m, x);
  std::vector<Matrix> u(m, Matrix::Zero(p.n, p.n));

  double rho = o.rho > 0.0 ? o.rho : 1.0;
  const double alpha = o.over_relaxation;
  const double inv_m = 1.0 / static_cast<double>(m);

  double best_lb = -kInf;
  double primal_res = kInf, dual_res = kInf;
  double obj = 0.0, gap = kInf;
  int iter = 0;
  bool converged = false;
  int next_assembly = 1;

  for (iter = 1; iter <= o.max_iter; ++iter) {
    x.setZero();
    for (std::size_t i = 0; i < m; ++i) x += z[i] - u[i];
    x -= w.a / rho;
    x *= inv_m;

    double primal_sq = 0.0, dual_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Matrix relaxed = alpha * x + (1.0 - alpha) * z[i] + u[i];
      Matrix z_new = project_block(blocks[i], relaxed, w);
      dual_sq += (z_new - z[i]).squaredNorm();
      u[i] = relaxed - z_new;
      z[i] = std::move(z_new);
      primal_sq += (x - z[i]).squaredNorm();
    }
    primal_res = std::sqrt(primal_sq * inv_m);
    dual_res = rho * std::sqrt(dual_sq * inv_m);

    const double x_scale = 1.0 + x.norm();
    const double d_scale = 1.0 + w.a.norm();
    const bool residuals_ok =
        primal_res <= o.eps_primal * x_scale && dual_res <= o.eps_dual * d_scale;

    if (residuals_ok || iter >= next_assembly) {
      next_assembly = iter + std::max(100, p.n);
      best_lb = std::max(best_lb,
                         w.a_scale * assemble_dual_bound(w, blocks, u, rho));
      const Matrix xp = polish(w, x);
      obj = w.a_scale * (w.a.array() * xp.array()).sum();
      gap = obj - best_lb;
      if (o.trace) {
        o.trace(TraceRecord{iter, primal_res, dual_res, gap, obj});
      }
      if (residuals_ok && gap <= o.eps_gap * (1.0 + std::abs(obj))) {
        if (feasibility_violation(w, xp) <= o.eps_primal * x_scale) {
          converged = true;
          break;
        }
      }
    }

    // Residual balancing; frozen near convergence to avoid limit cycles.
    if (iter % 50 == 0 && !residuals_ok &&
        (primal_res > 10.0 * o.eps_primal * x_scale ||
         dual_res > 10.0 * o.eps_dual * d_scale)) {
      if (primal_res > 10.0 * dual_res && rho < 1e6) {
        rho *= 2.0;
        for (auto& ui : u) ui /= 2.0;
      } else if (dual_res > 10.0 * primal_res && rho > 1e-6) {
        rho /= 2.0;
        for (auto& ui : u) ui *= 2.0;
      }
    }
  }
  iter = std::min(iter, o.max_iter);

  best_lb =
      std::max(best_lb, w.a_scale * assemble_dual_bound(w, blocks, u, rho));
  res.solution = polish(w, x);
  res.primal_obj = w.a_scale * (w.a.array() * res.solution.array()).sum();
  res.dual_lb = best_lb;
  res.residuals.primal = feasibility_violation(w, res.solution);
  res.residuals.dual = dual_res;
  res.residuals.gap = res.primal_obj - res.dual_lb;
  res.iterations = iter;
  const double hs_violation =
      w.has_halfspace
          ? (w.m.array() * res.solution.array()).sum() - w.level
          : 0.0;
  if (converged) {
    res.status = SolveStatus::Converged;
  } else if (w.has_halfspace && iter >= 1000 &&
             hs_violation > 1e-4 * (1.0 + std::abs(w.level)) &&
             primal_res > 10.0 * o.eps_primal * (1.0 + x.norm())) {
    // A stalled consensus with a persistently violated half-space is the
    // signature of an empty feasible set.
    res.status = SolveStatus::NumericalFailure;
    res.message =
        "consensus stalled with the loss constraint unsatisfied; the level "
        "may be below the minimum attainable loss";
  } else {
    res.status = SolveStatus::MaxIter;
    res.message = "iteration limit reached";
  }
  return res;
}

SolveResult solve_relaxation(const Matrix& loss, ConeVariant cone, int K,
                             const SolveOptions& o, const Vector* degrees) {
  SSProblem p;
  p.n = static_cast<int>(loss.rows());
  p.K = K;
  p.objective = loss;
  p.loss = loss;
  p.level = kNoLevel;
  p.cone = cone;
  if (degrees != nullptr) p.degrees = *degrees;
  return solve_ss(p, o);
}

}  // namespace stabcert
