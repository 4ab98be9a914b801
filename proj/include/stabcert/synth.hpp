#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stabcert/types.hpp"

namespace stabcert {

struct LabeledDataset {
  Dataset data;
  std::vector<int> labels;
};

enum class CenterGeometry { Simplex, Line };

/// Mixture of K spherical Gaussians with covariance sigma^2 I_d. Simplex
/// geometry places the means at the corners of a regular simplex scaled to
/// the requested pairwise separation (requires K <= d + 1); line geometry
/// spaces them `separation` apart along the first axis. Cluster sizes are
/// floor(n p_k) with largest-remainder fixup, so p_min is exact.
LabeledDataset gaussian_mixture(int n, int K, int d, double sigma,
                                const std::vector<double>& proportions,
                                CenterGeometry geometry, double separation,
                                std::uint64_t seed);

/// As gaussian_mixture (simplex geometry) but coordinate 0 is centered
/// Gamma(2, 0.4) noise rescaled by sigma.
LabeledDataset non_normal_mixture(int n, int K, int d, double sigma,
                                  const std::vector<double>& proportions,
                                  std::uint64_t seed);

/// K unit balls with centers spaced `spacing` apart on a line, points
/// sampled uniformly inside each ball, equal cluster sizes.
LabeledDataset stochastic_ball(int n, int K, int d, double spacing,
                               std::uint64_t seed);

/// Block-constant similarity: `within` on co-clustered pairs, `between`
/// elsewhere, zero diagonal. Empty `sizes` means near-equal blocks.
SimilarityGraph block_similarity(int n, int K, const std::vector<int>& sizes,
                                 double within, double between,
                                 std::uint64_t seed);

/// Multiplies each upper-triangle entry by (1 + sigma u), u ~ Uniform[0,1)
/// i.i.d., then symmetrizes.
SimilarityGraph perturb_similarity(const SimilarityGraph& g, double sigma,
                                   std::uint64_t seed);

/// Planted labels of block_similarity with the given sizes.
std::vector<int> block_labels(int n, int K, const std::vector<int>& sizes);

/// Calls fn once per partition of [n] into exactly K nonempty clusters,
/// labels in restricted-growth (first-occurrence) order, so each partition
/// appears exactly once up to label permutation. Guarded to n <= 14.
void enumerate_partitions(int n, int K,
                          const std::function<void(const Clustering&)>& fn);

/// Stirling number of the second kind S(n, K) (count of the above).
std::uint64_t count_partitions(int n, int K);

/// Appends m points drawn uniformly from the data's bounding box expanded
/// by `spread` in every coordinate.
Dataset add_outliers(const Dataset& ds, int m, double spread,
                     std::uint64_t seed);

}  // namespace stabcert
