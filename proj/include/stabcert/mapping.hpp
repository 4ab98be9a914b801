#pragma once

#include "stabcert/types.hpp"

namespace stabcert {

/// The matrix representations of a clustering used by the sublevel-set
/// machinery:
///   Membership   X_ij  = 1/n_k on co-clustered pairs, 0 elsewhere
///   Indicator    X~_ij = 1 on co-clustered pairs, 0 elsewhere
///   Orthonormal  Z_ik  = 1/sqrt(n_k) for i in C_k (n x K, Z^T Z = I)
///   NCut         X_ij  = sqrt(w_i w_j) / vol(C_k) on co-clustered pairs
enum class ClusterMapping { Membership, Indicator, Orthonormal, NCut };

/// Dense matrix of the given mapping. `degrees` is required (and must be
/// positive) for the NCut mapping and ignored otherwise.
Matrix materialize(ClusterMapping mapping, const Clustering& c,
                   const Vector* degrees = nullptr);

/// <materialize(mapping, c), xp> computed blockwise, without forming the
/// clustering matrix. xp must be n x n (n x K for the Orthonormal mapping).
double blockwise_inner(const Clustering& c, const Matrix& xp,
                       ClusterMapping mapping, const Vector* degrees = nullptr);

/// <X(a), X(b)> for two clusterings over the same points, via the confusion
/// matrix: sum_{k,k'} |A_k ∩ B_k'|^2 / (n_k n'_k').
double pair_inner(const Clustering& a, const Clustering& b);

/// <X_w(a), X_w(b)> for the NCut mapping with node weights w.
double pair_inner(const Clustering& a, const Clustering& b, const Vector& w);

/// ||X(a) - X(b)||_F^2 = 2K - 2<X(a), X(b)>; exact for clustering matrices.
double membership_gap_squared(const Clustering& a, const Clustering& b);
double membership_gap_squared(const Clustering& a, const Clustering& b,
                              const Vector& w);

}  // namespace stabcert
