#pragma once

#include <cstdint>
#include <vector>

#include "mmgl/graph/graph.hpp"

namespace mmgl {

/// Which node features drive similarity ranking.
enum class SimilaritySource { text, image, fused };

struct StructureSelectSpec {
  std::size_t k = 3;
  std::size_t hops = 1;
  SimilaritySource similarity = SimilaritySource::fused;

  void validate() const;
};

/// Uniform sample without replacement of up to `m` hop-1 neighbors of `v`.
/// Returns every neighbor when degree(v) <= m; deterministic given `seed`.
std::vector<NodeId> sample_neighbors(const MultimodalGraph& graph, NodeId v, std::size_t m,
                                     std::uint64_t seed);

/// All nodes within `hops` of `v` (BFS, `v` excluded), ascending id.
std::vector<NodeId> hop_neighborhood(const Adjacency& adjacency, NodeId v, std::size_t hops);

/// Up to spec.k nodes from the spec.hops neighborhood of `v`, sorted by
/// descending cosine similarity of their `features` row to v's row, ties by
/// ascending id. `features` holds one row per node.
std::vector<NodeId> top_k_similar_neighbors(const MultimodalGraph& graph, NodeId v,
                                            const StructureSelectSpec& spec, const Tensor& features);

}  // namespace mmgl
