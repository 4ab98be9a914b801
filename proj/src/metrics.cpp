#include "stabcert/metrics.hpp"

#include <cmath>
#include <limits>

namespace stabcert {

namespace {

void check_pair(const Clustering& a, const Clustering& b) {
  if (a.n() != b.n()) throw DimensionError("clusterings must share n");
  if (a.K() != b.K()) throw DimensionError("clusterings must share K");
}

}  // namespace

ConfusionMatrix ConfusionMatrix::counts(const Clustering& a,
                                        const Clustering& b) {
  check_pair(a, b);
  Matrix t = Matrix::Zero(a.K(), b.K());
  for (int i = 0; i < a.n(); ++i) t(a.label(i), b.label(i)) += 1.0;
  return ConfusionMatrix(std::move(t));
}

ConfusionMatrix ConfusionMatrix::weighted(const Clustering& a,
                                          const Clustering& b,
                                          const Vector& w) {
  check_pair(a, b);
  if (w.size() != a.n()) throw DimensionError("weight vector length must equal n");
  if (w.minCoeff() <= 0.0) throw std::invalid_argument("weights must be positive");
  Matrix t = Matrix::Zero(a.K(), b.K());
  for (int i = 0; i < a.n(); ++i) t(a.label(i), b.label(i)) += w(i);
  return ConfusionMatrix(std::move(t));
}

// Hungarian algorithm (shortest augmenting path with potentials) on the
// minimization form; scores are negated to maximize.
double max_assignment(const Matrix& scores) {
  const int k = static_cast<int>(scores.rows());
  if (scores.cols() != k) throw DimensionError("assignment matrix must be square");
  if (k == 0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();

  // 1-indexed potentials; way[j] is the column matched just before j on the
  // augmenting path.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> match(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    std::vector<double> minv(k + 1, inf);
    std::vector<int> way(k + 1, 0);
    std::vector<bool> used(k + 1, false);
    int j0 = 0;
    match[0] = i;
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = -scores(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= k; ++j) total += scores(match[j] - 1, j - 1);
  return total;
}

double em_distance(const Clustering& a, const Clustering& b) {
  const auto cm = ConfusionMatrix::counts(a, b);
  return 1.0 - max_assignment(cm.totals()) / a.n();
}

double weighted_em_distance(const Clustering& a, const Clustering& b,
                            const Vector& w) {
  const auto cm = ConfusionMatrix::weighted(a, b, w);
  return 1.0 - max_assignment(cm.totals()) / cm.grand_total();
}

}  // namespace stabcert
