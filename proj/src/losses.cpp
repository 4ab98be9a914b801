#include "stabcert/losses.hpp"

#include <cmath>

namespace stabcert {

namespace {

// Kahan-compensated accumulator; keeps long reductions exact enough for the
// large-n instances without changing small-n results.
class CompensatedSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace

Matrix squared_distance_matrix(const Dataset& ds) {
  const int n = ds.n();
  const int d = ds.dim();
  const Matrix& p = ds.points();
  Matrix dist = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < d; ++m) {
        const double diff = p(i, m) - p(j, m);
        s += diff * diff;
      }
      dist(i, j) = s;
      dist(j, i) = s;
    }
  }
  return dist;
}

double kmeans_loss(const Dataset& ds, const Clustering& c) {
  if (c.n() != ds.n()) throw DimensionError("clustering size must match dataset");
  const Matrix& p = ds.points();
  CompensatedSum total;
  for (int k = 0; k < c.K(); ++k) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(ds.dim());
    for (int i : c.members(k)) mu += p.row(i);
    mu /= static_cast<double>(c.size(k));
    for (int i : c.members(k)) total.add((p.row(i) - mu).squaredNorm());
  }
  return total.value() / ds.n();
}

double kmeans_loss_matrix(const Matrix& d, const Matrix& xp) {
  if (d.rows() != d.cols()) throw DimensionError("distance matrix must be square");
  if (xp.rows() != d.rows() || xp.cols() != d.cols()) {
    throw DimensionError("matrix shapes must match");
  }
  CompensatedSum total;
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    for (Eigen::Index i = 0; i < d.rows(); ++i) total.add(d(i, j) * xp(i, j));
  return total.value() / (2.0 * d.rows());
}

double ncut_loss(const SimilarityGraph& g, const Clustering& c) {
  if (c.n() != g.n()) throw DimensionError("clustering size must match graph");
  const Matrix& w = g.weights();
  double total = 0.0;
  for (int k = 0; k < c.K(); ++k) {
    const double vol = c.volume(k, g.degrees());
    if (vol <= 0.0) throw std::invalid_argument("zero-volume cluster");
    CompensatedSum assoc;
    for (int i : c.members(k))
      for (int j : c.members(k)) assoc.add(w(i, j));
    // cut = vol - assoc, since vol sums all rows of the cluster.
    total += (vol - assoc.value()) / vol;
  }
  return total;
}

Matrix normalized_laplacian(const SimilarityGraph& g) {
  const int n = g.n();
  Vector inv_sqrt = g.degrees().cwiseSqrt().cwiseInverse();
  Matrix l = -(inv_sqrt.asDiagonal() * g.weights() * inv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  // Symmetrize against rounding drift.
  l = ((l + l.transpose()) / 2.0).eval();
  return l;
}

}  // namespace stabcert
