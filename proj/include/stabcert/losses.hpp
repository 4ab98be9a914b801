#pragma once

#include "stabcert/types.hpp"

namespace stabcert {

/// D_ij = ||x_i - x_j||^2 (symmetric, zero diagonal, nonnegative).
Matrix squared_distance_matrix(const Dataset& ds);

/// K-means distortion: (1/n) sum_k sum_{i in C_k} ||x_i - mu_k||^2.
double kmeans_loss(const Dataset& ds, const Clustering& c);

/// Matrix form of the K-means loss: <D, xp> / (2n). Equals kmeans_loss when
/// xp is the membership matrix of c.
double kmeans_loss_matrix(const Matrix& d, const Matrix& xp);

/// Normalized cut: sum_k cut(C_k, complement) / vol(C_k).
double ncut_loss(const SimilarityGraph& g, const Clustering& c);

/// L = I - diag(w)^{-1/2} W diag(w)^{-1/2}. Satisfies L sqrt(w) = 0 and has
/// spectrum in [0, 2].
Matrix normalized_laplacian(const SimilarityGraph& g);

}  // namespace stabcert
