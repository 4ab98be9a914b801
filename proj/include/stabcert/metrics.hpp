#pragma once

#include "stabcert/types.hpp"

namespace stabcert {

/// K x K contingency table between two clusterings. Entry (k, k') holds the
/// count (or total weight) of points in C_k ∩ C'_k'.
class ConfusionMatrix {
 public:
  static ConfusionMatrix counts(const Clustering& a, const Clustering& b);
  static ConfusionMatrix weighted(const Clustering& a, const Clustering& b,
                                  const Vector& w);

  const Matrix& totals() const { return totals_; }
  double grand_total() const { return totals_.sum(); }

 private:
  explicit ConfusionMatrix(Matrix totals) : totals_(std::move(totals)) {}
  Matrix totals_;
};

/// Maximum-total assignment over a square score matrix, solved exactly by
/// the Hungarian algorithm in O(K^3).
double max_assignment(const Matrix& scores);

/// Earth mover's (misclassification error) distance between two clusterings
/// with the same n and K:  1 - (1/n) max_pi sum_k |C_k ∩ C'_pi(k)|.
double em_distance(const Clustering& a, const Clustering& b);

/// Weighted variant; reduces to em_distance when all weights are equal.
double weighted_em_distance(const Clustering& a, const Clustering& b,
                            const Vector& w);

}  // namespace stabcert
