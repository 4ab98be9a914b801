#pragma once

#include <cstdint>
#include <vector>

#include "stabcert/types.hpp"

namespace stabcert {

enum class KMeansInit { KMeansPP, Labels, Random };

struct KMeansOptions {
  KMeansInit init = KMeansInit::KMeansPP;
  std::uint64_t seed = 0;
  int max_iter = 100;
  std::vector<int> init_labels;        // used when init == Labels
  std::vector<double>* loss_trace = nullptr;  // per-iteration loss, optional
};

/// Lloyd iterations from the chosen seeding. Deterministic given the seed;
/// the loss never increases between iterations; empty clusters are repaired
/// by reassigning the point farthest from its current centroid.
Clustering lloyd_kmeans(const Dataset& ds, int K, const KMeansOptions& o);

/// Spectral clustering for normalized cut: rows of the top-K eigenvectors of
/// diag(w)^{-1/2} W diag(w)^{-1/2}, row-normalized, clustered by
/// lloyd_kmeans with k-means++ seeding.
Clustering spectral_ncut(const SimilarityGraph& g, int K, std::uint64_t seed);

struct OutlierRemoval {
  Dataset kept;
  std::vector<int> removed;  // original indices, ascending
};

/// Removes the n0 points with the largest sum of distances to their
/// max(1, ceil(neighbor_frac * n)) nearest neighbors. Independent of any
/// clustering.
OutlierRemoval remove_outliers(const Dataset& ds, int n0, double neighbor_frac);

}  // namespace stabcert
