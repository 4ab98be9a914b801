#pragma once

#include <string>
#include <vector>

#include "stabcert/types.hpp"

namespace stabcert {

/// Headerless CSV, one point per row.
Dataset read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const Matrix& points);

/// One integer label per line.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

/// Similarity matrix: dense CSV (n rows of n values) or coordinate triplets
/// "i,j,w" (0-based, symmetrized on load). A square numeric block is parsed
/// as dense; otherwise rows of exactly three values are treated as
/// coordinates.
SimilarityGraph read_similarity(const std::string& path);
void write_similarity_csv(const std::string& path, const Matrix& weights);

/// One positive weight per line.
Vector read_weights(const std::string& path);

}  // namespace stabcert
