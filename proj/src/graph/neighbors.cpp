#include "mmgl/graph/neighbors.hpp"

#include <algorithm>

#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/numerics/random.hpp"

namespace mmgl {
namespace {

void require_node(const MultimodalGraph& graph, NodeId v) {
  if (v >= graph.num_nodes()) {
    throw Error(Errc::InvalidNode, "node " + std::to_string(v) + " not in graph of " +
                                       std::to_string(graph.num_nodes()) + " nodes");
  }
}

}  // namespace

void StructureSelectSpec::validate() const {
  if (k < 1) throw Error(Errc::InvalidArgument, "structure selection needs k >= 1");
  if (hops < 1) throw Error(Errc::InvalidArgument, "structure selection needs h >= 1");
}

std::vector<NodeId> sample_neighbors(const MultimodalGraph& graph, NodeId v, std::size_t m,
                                     std::uint64_t seed) {
  require_node(graph, v);
  const auto nb = graph.adjacency.neighbors(v);
  std::vector<NodeId> pool(nb.begin(), nb.end());
  Rng rng(derive_seed(seed, v));
  const std::size_t take = std::min(m, pool.size());
  // Partial Fisher-Yates: the first `take` slots become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

std::vector<NodeId> hop_neighborhood(const Adjacency& adjacency, NodeId v, std::size_t hops) {
  std::vector<char> seen(adjacency.num_nodes(), 0);
  seen[v] = 1;
  std::vector<NodeId> frontier{v};
  std::vector<NodeId> out;
  for (std::size_t depth = 0; depth < hops && !frontier.empty(); ++depth) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId w : adjacency.neighbors(u)) {
        if (seen[w]) continue;
        seen[w] = 1;
        next.push_back(w);
        out.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> top_k_similar_neighbors(const MultimodalGraph& graph, NodeId v,
                                            const StructureSelectSpec& spec, const Tensor& features) {
  spec.validate();
  require_node(graph, v);
  if (features.rows() != graph.num_nodes()) {
    throw Error(Errc::ShapeMismatch, "similarity features have " + std::to_string(features.rows()) +
                                         " rows for " + std::to_string(graph.num_nodes()) + " nodes");
  }
  const auto candidates = hop_neighborhood(graph.adjacency, v, spec.hops);
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(candidates.size());
  for (NodeId u : candidates) scored.emplace_back(cosine_similarity(features.row(v), features.row(u)), u);
  const std::size_t keep = std::min(spec.k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<NodeId> out(keep);
  for (std::size_t i = 0; i < keep; ++i) out[i] = scored[i].second;
  return out;
}

}  // namespace mmgl
