#include "stabcert/clusterers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stabcert/eig.hpp"
#include "stabcert/rng.hpp"

namespace stabcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix centroids_of(const Matrix& p, const std::vector<int>& labels, int K) {
  Matrix mu = Matrix::Zero(K, p.cols());
  std::vector<int> counts(K, 0);
  for (int i = 0; i < p.rows(); ++i) {
    mu.row(labels[i]) += p.row(i);
    ++counts[labels[i]];
  }
  for (int k = 0; k < K; ++k) {
    if (counts[k] > 0) mu.row(k) /= counts[k];
  }
  return mu;
}

// Assigns each point to the nearest centroid; ties go to the lowest index.
void assign_nearest(const Matrix& p, const Matrix& mu, std::vector<int>* labels) {
  for (int i = 0; i < p.rows(); ++i) {
    int best = 0;
    double best_d = (p.row(i) - mu.row(0)).squaredNorm();
    for (int k = 1; k < mu.rows(); ++k) {
      const double d = (p.row(i) - mu.row(k)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    (*labels)[i] = best;
  }
}

std::vector<int> kmeanspp_seeds(const Matrix& p, int K, Rng* rng) {
  const int n = static_cast<int>(p.rows());
  std::vector<int> seeds;
  seeds.reserve(K);
  seeds.push_back(rng->uniform_int(0, n - 1));
  Vector dist2 = Vector::Constant(n, kInf);
  for (int k = 1; k < K; ++k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (p.row(i) - p.row(seeds.back())).squaredNorm();
      dist2(i) = std::min(dist2(i), d);
      total += dist2(i);
    }
    int chosen = -1;
    if (total <= 0.0) {
      // All remaining points coincide with chosen seeds; pick the lowest
      // index not yet used.
      for (int i = 0; i < n && chosen < 0; ++i) {
        if (std::find(seeds.begin(), seeds.end(), i) == seeds.end()) chosen = i;
      }
    } else {
      const double target = rng->uniform01() * total;
      double acc = 0.0;
      int last_positive = -1;
      for (int i = 0; i < n; ++i) {
        if (dist2(i) <= 0.0) continue;
        acc += dist2(i);
        last_positive = i;
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = last_positive;
    }
    seeds.push_back(chosen);
  }
  return seeds;
}

double lloyd_loss(const Matrix& p, const std::vector<int>& labels,
                  const Matrix& mu) {
  double total = 0.0;
  for (int i = 0; i < p.rows(); ++i) {
    total += (p.row(i) - mu.row(labels[i])).squaredNorm();
  }
  return total / p.rows();
}

// Hands each empty cluster the point farthest from its current centroid.
void repair_empty(const Matrix& p, std::vector<int>* labels, int K) {
  while (true) {
    std::vector<int> counts(K, 0);
    for (int v : *labels) ++counts[v];
    int empty = -1;
    for (int k = 0; k < K; ++k) {
      if (counts[k] == 0) {
        empty = k;
        break;
      }
    }
    if (empty < 0) return;
    const Matrix mu = centroids_of(p, *labels, K);
    int worst = -1;
    double worst_d = -1.0;
    for (int i = 0; i < p.rows(); ++i) {
      if (counts[(*labels)[i]] <= 1) continue;  // do not empty another cluster
      const double d = (p.row(i) - mu.row((*labels)[i])).squaredNorm();
      if (d > worst_d) {
        worst_d = d;
        worst = i;
      }
    }
    if (worst < 0) throw NumericalError("cannot repair empty cluster");
    (*labels)[worst] = empty;
  }
}

}  // namespace

Clustering lloyd_kmeans(const Dataset& ds, int K, const KMeansOptions& o) {
  const int n = ds.n();
  if (K < 1 || K > n) throw std::invalid_argument("require 1 <= K <= n");
  const Matrix& p = ds.points();
  Rng rng(o.seed);

  std::vector<int> labels(n, 0);
  switch (o.init) {
    case KMeansInit::KMeansPP: {
      const std::vector<int> seeds = kmeanspp_seeds(p, K, &rng);
      Matrix mu(K, ds.dim());
      for (int k = 0; k < K; ++k) mu.row(k) = p.row(seeds[k]);
      assign_nearest(p, mu, &labels);
      break;
    }
    case KMeansInit::Labels:
      if (static_cast<int>(o.init_labels.size()) != n) {
        throw std::invalid_argument("init_labels must have length n");
      }
      labels = o.init_labels;
      for (int v : labels) {
        if (v < 0 || v >= K) throw InvalidClusteringError("init label out of range");
      }
      break;
    case KMeansInit::Random:
      for (int i = 0; i < n; ++i) labels[i] = rng.uniform_int(0, K - 1);
      break;
  }
  repair_empty(p, &labels, K);

  if (o.loss_trace) o.loss_trace->clear();
  double prev_loss = kInf;
  for (int it = 0; it < o.max_iter; ++it) {
    const Matrix mu = centroids_of(p, labels, K);
    std::vector<int> next = labels;
    assign_nearest(p, mu, &next);
    repair_empty(p, &next, K);
    const Matrix mu_next = centroids_of(p, next, K);
    const double loss = lloyd_loss(p, next, mu_next);
    if (o.loss_trace) o.loss_trace->push_back(loss);
    if (loss > prev_loss + 1e-15 || next == labels) {
      if (loss <= prev_loss) labels = next;
      break;
    }
    labels = next;
    prev_loss = loss;
  }
  return Clustering(std::move(labels), K);
}

Clustering spectral_ncut(const SimilarityGraph& g, int K, std::uint64_t seed) {
  const int n = g.n();
  if (K < 1 || K > n) throw std::invalid_argument("require 1 <= K <= n");
  Vector inv_sqrt = g.degrees().cwiseSqrt().cwiseInverse();
  Matrix normalized =
      inv_sqrt.asDiagonal() * g.weights() * inv_sqrt.asDiagonal();
  const EigResult eig = symmetric_eig(normalized);

  // Top-K eigenvectors (eigenvalues ascending), rows normalized.
  Matrix embedding(n, K);
  for (int k = 0; k < K; ++k) embedding.col(k) = eig.vectors.col(n - 1 - k);
  for (int i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  KMeansOptions o;
  o.init = KMeansInit::KMeansPP;
  o.seed = seed;
  o.max_iter = 100;
  return lloyd_kmeans(Dataset(embedding), K, o);
}

OutlierRemoval remove_outliers(const Dataset& ds, int n0, double neighbor_frac) {
  const int n = ds.n();
  if (n0 < 0 || n0 >= n) throw std::invalid_argument("require 0 <= n0 < n");
  if (neighbor_frac <= 0.0 || neighbor_frac >= 1.0) {
    throw std::invalid_argument("neighbor_frac must lie in (0, 1)");
  }
  if (n0 == 0) return OutlierRemoval{ds, {}};
  const int k = std::max(1, static_cast<int>(std::ceil(neighbor_frac * n)));
  const Matrix& p = ds.points();
  std::vector<double> score(n, 0.0);
  std::vector<double> dists(n - 1);
  for (int i = 0; i < n; ++i) {
    int m = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) dists[m++] = (p.row(i) - p.row(j)).norm();
    }
    const int kk = std::min(k, n - 1);
    std::nth_element(dists.begin(), dists.begin() + kk - 1, dists.end());
    score[i] = std::accumulate(dists.begin(), dists.begin() + kk, 0.0);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  std::vector<int> removed(order.begin(), order.begin() + n0);
  std::sort(removed.begin(), removed.end());
  Matrix kept(n - n0, ds.dim());
  int row = 0;
  std::size_t r = 0;
  for (int i = 0; i < n; ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
      continue;
    }
    kept.row(row++) = p.row(i);
  }
  return OutlierRemoval{Dataset(std::move(kept)), std::move(removed)};
}

}  // namespace stabcert
