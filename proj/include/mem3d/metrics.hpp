#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mem3d/geometry.hpp"

namespace mem3d {

// A feature vector produced by an external encoder. Values are stored as
// ingested; normalize_embedding produces the unit-norm form the distance
// assumes.
struct EmbeddingVector {
    std::vector<double> values;
};

struct EmbeddingSet {
    std::size_t dim = 0;
    std::vector<std::pair<std::string, EmbeddingVector>> entries;
};

EmbeddingVector normalize_embedding(const EmbeddingVector& v); // throws on zero norm

// Symmetric average of squared nearest-neighbor distances. Accelerated by a
// uniform grid; exact, verified against the brute-force oracle.
double chamfer_distance(const PointCloud& s1, const PointCloud& s2);

// 1 - <f1, f2> for unit-normalized inputs.
double embedding_distance(const EmbeddingVector& f1, const EmbeddingVector& f2);

// Mean of the per-view vectors followed by L2 normalization.
EmbeddingVector aggregate_view_embeddings(const std::vector<EmbeddingVector>& views);

} // namespace mem3d
