#include "stabcert/types.hpp"

#include <algorithm>
#include <cmath>

namespace stabcert {

Dataset::Dataset(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw DimensionError("Dataset requires n >= 1 and d >= 1");
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("Dataset entries must be finite");
  }
}

SimilarityGraph::SimilarityGraph(Matrix weights) : weights_(std::move(weights)) {
  const auto n = weights_.rows();
  if (n < 1 || weights_.cols() != n) {
    throw DimensionError("similarity matrix must be square");
  }
  if (!weights_.allFinite()) {
    throw std::invalid_argument("similarity entries must be finite");
  }
  const double scale = std::max(1.0, weights_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (weights_(i, j) < 0.0) {
        throw std::invalid_argument("similarity entries must be nonnegative");
      }
      if (std::abs(weights_(i, j) - weights_(j, i)) > 1e-12 * scale) {
        throw std::invalid_argument("similarity matrix must be symmetric");
      }
    }
  }
  // Exact symmetry from here on.
  weights_ = ((weights_ + weights_.transpose()) / 2.0).eval();
  degrees_ = weights_.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degrees_(i) <= 0.0) {
      throw std::invalid_argument("node " + std::to_string(i) +
                                  " has zero degree");
    }
  }
}

Clustering::Clustering(std::vector<int> labels, int K)
    : labels_(std::move(labels)), K_(K) {
  const int n = static_cast<int>(labels_.size());
  if (n < 1) throw InvalidClusteringError("empty label vector");
  if (K_ < 1 || K_ > n) {
    throw InvalidClusteringError("K must satisfy 1 <= K <= n");
  }
  sizes_.assign(K_, 0);
  for (int i = 0; i < n; ++i) {
    const int k = labels_[i];
    if (k < 0 || k >= K_) {
      throw InvalidClusteringError("label " + std::to_string(k) +
                                   " out of range [0, K)");
    }
    ++sizes_[k];
  }
  for (int k = 0; k < K_; ++k) {
    if (sizes_[k] == 0) {
      throw InvalidClusteringError("cluster " + std::to_string(k) +
                                   " is empty");
    }
  }
  members_.assign(K_, {});
  for (int k = 0; k < K_; ++k) members_[k].reserve(sizes_[k]);
  for (int i = 0; i < n; ++i) members_[labels_[i]].push_back(i);
}

Clustering Clustering::from_labels(std::vector<int> labels, int K) {
  if (K < 0) {
    int max_label = -1;
    for (int v : labels) max_label = std::max(max_label, v);
    K = max_label + 1;
  }
  return Clustering(std::move(labels), K);
}

RelativeSizes Clustering::relative_sizes() const {
  RelativeSizes out;
  out.weighting = SizeWeighting::Counts;
  const auto [mn, mx] = std::minmax_element(sizes_.begin(), sizes_.end());
  out.p_min = static_cast<double>(*mn) / n();
  out.p_max = static_cast<double>(*mx) / n();
  return out;
}

RelativeSizes Clustering::relative_sizes(const Vector& weights) const {
  if (weights.size() != n()) {
    throw DimensionError("weight vector length must equal n");
  }
  double total = 0.0;
  std::vector<double> vols(K_, 0.0);
  for (int i = 0; i < n(); ++i) {
    if (weights(i) <= 0.0) {
      throw std::invalid_argument("weights must be positive");
    }
    vols[labels_[i]] += weights(i);
    total += weights(i);
  }
  RelativeSizes out;
  out.weighting = SizeWeighting::Degrees;
  const auto [mn, mx] = std::minmax_element(vols.begin(), vols.end());
  out.p_min = *mn / total;
  out.p_max = *mx / total;
  return out;
}

double Clustering::volume(int k, const Vector& weights) const {
  double v = 0.0;
  for (int i : members_[k]) v += weights(i);
  return v;
}

}  // namespace stabcert
