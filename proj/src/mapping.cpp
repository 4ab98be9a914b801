#include "stabcert/mapping.hpp"

#include <cmath>

namespace stabcert {

namespace {

void require_degrees(const Clustering& c, const Vector* degrees) {
  if (degrees == nullptr) {
    throw std::invalid_argument("NCut mapping requires a degree vector");
  }
  if (degrees->size() != c.n()) {
    throw DimensionError("degree vector length must equal n");
  }
  if (degrees->minCoeff() <= 0.0) {
    throw std::invalid_argument("NCut mapping requires positive degrees");
  }
}

}  // namespace

Matrix materialize(ClusterMapping mapping, const Clustering& c,
                   const Vector* degrees) {
  const int n = c.n();
  switch (mapping) {
    case ClusterMapping::Membership: {
      Matrix x = Matrix::Zero(n, n);
      for (int k = 0; k < c.K(); ++k) {
        const double v = 1.0 / c.size(k);
        for (int i : c.members(k))
          for (int j : c.members(k)) x(i, j) = v;
      }
      return x;
    }
    case ClusterMapping::Indicator: {
      Matrix x = Matrix::Zero(n, n);
      for (int k = 0; k < c.K(); ++k)
        for (int i : c.members(k))
          for (int j : c.members(k)) x(i, j) = 1.0;
      return x;
    }
    case ClusterMapping::Orthonormal: {
      Matrix z = Matrix::Zero(n, c.K());
      for (int k = 0; k < c.K(); ++k) {
        const double v = 1.0 / std::sqrt(static_cast<double>(c.size(k)));
        for (int i : c.members(k)) z(i, k) = v;
      }
      return z;
    }
    case ClusterMapping::NCut: {
      require_degrees(c, degrees);
      Matrix x = Matrix::Zero(n, n);
      for (int k = 0; k < c.K(); ++k) {
        const double vol = c.volume(k, *degrees);
        for (int i : c.members(k))
          for (int j : c.members(k))
            x(i, j) = std::sqrt((*degrees)(i) * (*degrees)(j)) / vol;
      }
      return x;
    }
  }
  throw std::logic_error("unreachable");
}

double blockwise_inner(const Clustering& c, const Matrix& xp,
                       ClusterMapping mapping, const Vector* degrees) {
  const int n = c.n();
  if (mapping == ClusterMapping::Orthonormal) {
    if (xp.rows() != n || xp.cols() != c.K()) {
      throw DimensionError("expected an n x K matrix for the Z mapping");
    }
    double total = 0.0;
    for (int k = 0; k < c.K(); ++k) {
      double s = 0.0;
      for (int i : c.members(k)) s += xp(i, k);
      total += s / std::sqrt(static_cast<double>(c.size(k)));
    }
    return total;
  }
  if (xp.rows() != n || xp.cols() != n) {
    throw DimensionError("expected an n x n matrix");
  }
  double total = 0.0;
  switch (mapping) {
    case ClusterMapping::Membership:
      for (int k = 0; k < c.K(); ++k) {
        double s = 0.0;
        for (int i : c.members(k))
          for (int j : c.members(k)) s += xp(i, j);
        total += s / c.size(k);
      }
      break;
    case ClusterMapping::Indicator:
      for (int k = 0; k < c.K(); ++k)
        for (int i : c.members(k))
          for (int j : c.members(k)) total += xp(i, j);
      break;
    case ClusterMapping::NCut: {
      require_degrees(c, degrees);
      for (int k = 0; k < c.K(); ++k) {
        double s = 0.0;
        for (int i : c.members(k))
          for (int j : c.members(k))
            s += std::sqrt((*degrees)(i) * (*degrees)(j)) * xp(i, j);
        total += s / c.volume(k, *degrees);
      }
      break;
    }
    case ClusterMapping::Orthonormal:
      break;  // handled above
  }
  return total;
}

double pair_inner(const Clustering& a, const Clustering& b) {
  if (a.n() != b.n()) throw DimensionError("clusterings must share n");
  Matrix counts = Matrix::Zero(a.K(), b.K());
  for (int i = 0; i < a.n(); ++i) counts(a.label(i), b.label(i)) += 1.0;
  double total = 0.0;
  for (int k = 0; k < a.K(); ++k)
    for (int kp = 0; kp < b.K(); ++kp) {
      const double m = counts(k, kp);
      if (m > 0.0) total += m * m / (static_cast<double>(a.size(k)) * b.size(kp));
    }
  return total;
}

double pair_inner(const Clustering& a, const Clustering& b, const Vector& w) {
  if (a.n() != b.n()) throw DimensionError("clusterings must share n");
  if (w.size() != a.n()) throw DimensionError("weight vector length must equal n");
  Matrix mass = Matrix::Zero(a.K(), b.K());
  for (int i = 0; i < a.n(); ++i) mass(a.label(i), b.label(i)) += w(i);
  std::vector<double> vol_a(a.K(), 0.0), vol_b(b.K(), 0.0);
  for (int k = 0; k < a.K(); ++k) vol_a[k] = a.volume(k, w);
  for (int k = 0; k < b.K(); ++k) vol_b[k] = b.volume(k, w);
  double total = 0.0;
  for (int k = 0; k < a.K(); ++k)
    for (int kp = 0; kp < b.K(); ++kp) {
      const double m = mass(k, kp);
      if (m > 0.0) total += m * m / (vol_a[k] * vol_b[kp]);
    }
  return total;
}

double membership_gap_squared(const Clustering& a, const Clustering& b) {
  if (a.K() != b.K()) throw DimensionError("clusterings must share K");
  return 2.0 * a.K() - 2.0 * pair_inner(a, b);
}

double membership_gap_squared(const Clustering& a, const Clustering& b,
                              const Vector& w) {
  if (a.K() != b.K()) throw DimensionError("clusterings must share K");
  return 2.0 * a.K() - 2.0 * pair_inner(a, b, w);
}

}  // namespace stabcert
