#include "stabcert/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stabcert/rng.hpp"

namespace stabcert {

namespace {

// floor(n p_k) with the remainder spread by largest fractional part; ties go
// to the lower index.
std::vector<int> allocate_sizes(int n, const std::vector<double>& proportions) {
  const int K = static_cast<int>(proportions.size());
  double total = 0.0;
  for (double p : proportions) {
    if (p <= 0.0) throw std::invalid_argument("proportions must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("proportions must sum to 1");
  }
  std::vector<int> sizes(K);
  std::vector<std::pair<double, int>> remainders(K);
  int assigned = 0;
  for (int k = 0; k < K; ++k) {
    const double exact = n * proportions[k];
    sizes[k] = static_cast<int>(std::floor(exact));
    remainders[k] = {exact - sizes[k], k};
    assigned += sizes[k];
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (int i = 0; i < n - assigned; ++i) ++sizes[remainders[i].second];
  for (int k = 0; k < K; ++k) {
    if (sizes[k] == 0) {
      throw std::invalid_argument("a cluster received zero points");
    }
  }
  return sizes;
}

// Corners of a regular (K-1)-simplex in R^d with the given pairwise
// separation, centered at the origin: the centered standard basis of R^K
// expressed in an orthonormal basis of the hyperplane orthogonal to 1.
Matrix simplex_centers(int K, int d, double separation) {
  if (K > d + 1) {
    throw std::invalid_argument("simplex geometry requires K <= d + 1");
  }
  if (K == 1) return Matrix::Zero(1, d);
  Matrix u = Matrix::Identity(K, K);
  u.array() -= 1.0 / K;
  // Orthonormal basis of 1-perp in R^K via Gram-Schmidt on e_i - e_{i+1}.
  Matrix basis(K, K - 1);
  for (int j = 0; j < K - 1; ++j) {
    Vector v = Vector::Zero(K);
    v(j) = 1.0;
    v(j + 1) = -1.0;
    for (int q = 0; q < j; ++q) v -= basis.col(q).dot(v) * basis.col(q);
    basis.col(j) = v / v.norm();
  }
  Matrix y = u * basis;  // K x (K-1), pairwise distances sqrt(2)
  y *= separation / std::sqrt(2.0);
  Matrix centers = Matrix::Zero(K, d);
  centers.block(0, 0, K, K - 1) = y;
  return centers;
}

Matrix line_centers(int K, int d, double separation) {
  Matrix centers = Matrix::Zero(K, d);
  for (int k = 0; k < K; ++k) centers(k, 0) = k * separation;
  return centers;
}

LabeledDataset mixture(int n, int K, int d, double sigma,
                       const std::vector<double>& proportions,
                       const Matrix& centers, std::uint64_t seed,
                       bool gamma_coordinate) {
  if (static_cast<int>(proportions.size()) != K) {
    throw std::invalid_argument("need one proportion per cluster");
  }
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  const std::vector<int> sizes = allocate_sizes(n, proportions);
  Rng rng(seed);
  Matrix points(n, d);
  std::vector<int> labels(n);
  // Gamma(2, 0.4) has mean shape * scale.
  const double gamma_mean = 2.0 * 0.4;
  int row = 0;
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < sizes[k]; ++i, ++row) {
      labels[row] = k;
      for (int m = 0; m < d; ++m) {
        double noise;
        if (gamma_coordinate && m == 0) {
          noise = rng.gamma(2.0, 0.4) - gamma_mean;
        } else {
          noise = rng.normal();
        }
        points(row, m) = centers(k, m) + sigma * noise;
      }
    }
  }
  return LabeledDataset{Dataset(std::move(points)), std::move(labels)};
}

}  // namespace

LabeledDataset gaussian_mixture(int n, int K, int d, double sigma,
                                const std::vector<double>& proportions,
                                CenterGeometry geometry, double separation,
                                std::uint64_t seed) {
  const Matrix centers = geometry == CenterGeometry::Simplex
                             ? simplex_centers(K, d, separation)
                             : line_centers(K, d, separation);
  return mixture(n, K, d, sigma, proportions, centers, seed, false);
}

LabeledDataset non_normal_mixture(int n, int K, int d, double sigma,
                                  const std::vector<double>& proportions,
                                  std::uint64_t seed) {
  const Matrix centers = simplex_centers(K, d, 4.0 * std::sqrt(2.0));
  return mixture(n, K, d, sigma, proportions, centers, seed, true);
}

LabeledDataset stochastic_ball(int n, int K, int d, double spacing,
                               std::uint64_t seed) {
  if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
  std::vector<double> proportions(K, 1.0 / K);
  const std::vector<int> sizes = allocate_sizes(n, proportions);
  Rng rng(seed);
  Matrix points(n, d);
  std::vector<int> labels(n);
  int row = 0;
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < sizes[k]; ++i, ++row) {
      labels[row] = k;
      // Uniform in the unit ball: gaussian direction, radius u^(1/d).
      Vector dir(d);
      double norm2 = 0.0;
      do {
        for (int m = 0; m < d; ++m) dir(m) = rng.normal();
        norm2 = dir.squaredNorm();
      } while (norm2 == 0.0);
      const double radius = std::pow(rng.uniform01(), 1.0 / d);
      dir *= radius / std::sqrt(norm2);
      for (int m = 0; m < d; ++m) points(row, m) = dir(m);
      points(row, 0) += k * spacing;
    }
  }
  return LabeledDataset{Dataset(std::move(points)), std::move(labels)};
}

std::vector<int> block_labels(int n, int K, const std::vector<int>& sizes) {
  std::vector<int> block_sizes = sizes;
  if (block_sizes.empty()) {
    block_sizes.assign(K, n / K);
    for (int k = 0; k < n % K; ++k) ++block_sizes[k];
  }
  if (static_cast<int>(block_sizes.size()) != K ||
      std::accumulate(block_sizes.begin(), block_sizes.end(), 0) != n) {
    throw std::invalid_argument("block sizes must have K entries summing to n");
  }
  std::vector<int> labels;
  labels.reserve(n);
  for (int k = 0; k < K; ++k) {
    if (block_sizes[k] < 1) throw std::invalid_argument("empty block");
    labels.insert(labels.end(), block_sizes[k], k);
  }
  return labels;
}

SimilarityGraph block_similarity(int n, int K, const std::vector<int>& sizes,
                                 double within, double between,
                                 std::uint64_t /*seed*/) {
  if (!(within > between) || between < 0.0) {
    throw std::invalid_argument("require within > between >= 0");
  }
  const std::vector<int> labels = block_labels(n, K, sizes);
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w(i, j) = (i == j) ? 0.0 : (labels[i] == labels[j] ? within : between);
    }
  }
  return SimilarityGraph(std::move(w));
}

SimilarityGraph perturb_similarity(const SimilarityGraph& g, double sigma,
                                   std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
  Rng rng(seed);
  Matrix w = g.weights();
  for (int i = 0; i < g.n(); ++i) {
    for (int j = i; j < g.n(); ++j) {
      const double factor = 1.0 + sigma * rng.uniform01();
      w(i, j) *= factor;
      w(j, i) = w(i, j);
    }
  }
  return SimilarityGraph(std::move(w));
}

void enumerate_partitions(int n, int K,
                          const std::function<void(const Clustering&)>& fn) {
  if (n > 14) throw std::invalid_argument("enumeration guarded to n <= 14");
  if (K < 1 || K > n) return;
  // Restricted growth strings: labels[i] <= max(labels[0..i-1]) + 1, with
  // exactly K values used. Depth-first with pruning on reachable K.
  std::vector<int> labels(n, 0);
  const std::function<void(int, int)> recurse = [&](int i, int used) {
    if (i == n) {
      if (used == K) fn(Clustering(labels, K));
      return;
    }
    if (used + (n - i) < K) return;  // cannot reach K clusters
    const int cap = std::min(used, K - 1);
    for (int v = 0; v <= cap; ++v) {
      labels[i] = v;
      recurse(i + 1, std::max(used, v + 1));
    }
  };
  recurse(0, 0);
}

std::uint64_t count_partitions(int n, int K) {
  if (K < 1 || K > n) return 0;
  std::vector<std::uint64_t> prev(K + 1, 0), cur(K + 1, 0);
  prev[0] = 1;  // S(0, 0)
  for (int i = 1; i <= n; ++i) {
    cur[0] = 0;
    for (int k = 1; k <= std::min(i, K); ++k) {
      cur[k] = k * prev[k] + prev[k - 1];
    }
    std::swap(prev, cur);
  }
  return prev[K];
}

Dataset add_outliers(const Dataset& ds, int m, double spread,
                     std::uint64_t seed) {
  if (m < 0) throw std::invalid_argument("m must be nonnegative");
  if (m == 0) return ds;
  Rng rng(seed);
  const Matrix& p = ds.points();
  Matrix out(ds.n() + m, ds.dim());
  out.topRows(ds.n()) = p;
  for (int j = 0; j < ds.dim(); ++j) {
    const double lo = p.col(j).minCoeff() - spread;
    const double hi = p.col(j).maxCoeff() + spread;
    for (int i = 0; i < m; ++i) out(ds.n() + i, j) = rng.uniform(lo, hi);
  }
  return Dataset(std::move(out));
}

}  // namespace stabcert
