#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when a label vector does not describe a valid K-partition
/// (empty cluster, label out of range, K out of range).
class InvalidClusteringError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when matrix/vector shapes do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine (eigensolver) fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SizeWeighting { Counts, Degrees };

/// Smallest and largest relative cluster sizes, tagged with the weighting
/// convention so count-based and degree-weighted values cannot be mixed up.
struct RelativeSizes {
  double p_min = 0.0;
  double p_max = 0.0;
  SizeWeighting weighting = SizeWeighting::Counts;
};

/// A finite point set in R^d. Rows of points() are the individual points.
class Dataset {
 public:
  explicit Dataset(Matrix points);

  int n() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Matrix& points() const { return points_; }
  Eigen::RowVectorXd point(int i) const { return points_.row(i); }

 private:
  Matrix points_;
};

/// A weighted undirected graph given by a symmetric nonnegative weight
/// matrix. Every node must have positive degree.
class SimilarityGraph {
 public:
  explicit SimilarityGraph(Matrix weights);

  int n() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  const Vector& degrees() const { return degrees_; }
  double total_weight() const { return degrees_.sum(); }

 private:
  Matrix weights_;
  Vector degrees_;
};

/// A K-partition of [n], stored as a label vector with values in [0, K).
/// Immutable after construction; all clusters are nonempty.
class Clustering {
 public:
  Clustering(std::vector<int> labels, int K);

  /// Builds a clustering, inferring K = max label + 1 when K < 0.
  static Clustering from_labels(std::vector<int> labels, int K = -1);

  int n() const { return static_cast<int>(labels_.size()); }
  int K() const { return K_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(int i) const { return labels_[i]; }
  const std::vector<int>& sizes() const { return sizes_; }
  int size(int k) const { return sizes_[k]; }
  /// Point indices of cluster k, ascending.
  const std::vector<int>& members(int k) const { return members_[k]; }

  RelativeSizes relative_sizes() const;
  /// Degree-weighted relative sizes: vol(C_k) / vol([n]).
  RelativeSizes relative_sizes(const Vector& weights) const;

  /// Sum of weights over cluster k.
  double volume(int k, const Vector& weights) const;

 private:
  std::vector<int> labels_;
  int K_ = 0;
  std::vector<int> sizes_;
  std::vector<std::vector<int>> members_;
};

}  // namespace stabcert
