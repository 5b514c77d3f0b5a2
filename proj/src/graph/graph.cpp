#include "mmgl/graph/graph.hpp"

#include <algorithm>

#include "mmgl/error.hpp"

namespace mmgl {

std::string_view modality_name(Modality m) noexcept {
  return m == Modality::text ? "text" : "image";
}

Modality parse_modality(std::string_view name) {
  if (name == "text") return Modality::text;
  if (name == "image") return Modality::image;
  throw Error(Errc::InvalidArgument, "unknown modality '" + std::string(name) + "'");
}

Adjacency Adjacency::from_edges(std::size_t num_nodes,
                                std::span<const std::pair<NodeId, NodeId>> edges,
                                EdgeStats* stats) {
  EdgeStats local;
  std::vector<std::pair<NodeId, NodeId>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw Error(Errc::InvalidNode, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                             ") references a node outside [0," +
                                             std::to_string(num_nodes) + ")");
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  const std::size_t before = directed.size();
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
  local.duplicates_dropped = (before - directed.size()) / 2;

  Adjacency adj;
  adj.offsets_.assign(num_nodes + 1, 0);
  adj.indices_.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++adj.offsets_[u + 1];
    adj.indices_.push_back(v);
  }
  for (std::size_t i = 0; i < num_nodes; ++i) adj.offsets_[i + 1] += adj.offsets_[i];
  if (stats) *stats = local;
  return adj;
}

bool Adjacency::has_edge(NodeId u, NodeId v) const {
  const auto n = neighbors(u);
  return std::binary_search(n.begin(), n.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Adjacency::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

const EmbeddingTable& MultimodalGraph::table(Modality m) const {
  const auto it = tables.find(m);
  if (it == tables.end()) {
    throw Error(Errc::ModalityUnavailable,
                "graph has no " + std::string(modality_name(m)) + " embedding table");
  }
  return it->second;
}

std::vector<int> MultimodalGraph::labels() const {
  std::vector<int> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = nodes[i].label;
  return out;
}

void MultimodalGraph::validate() const {
  if (adjacency.num_nodes() != nodes.size()) {
    throw Error(Errc::MalformedRecord, "adjacency covers " + std::to_string(adjacency.num_nodes()) +
                                           " nodes, graph has " + std::to_string(nodes.size()));
  }
  for (NodeId u = 0; u < nodes.size(); ++u) {
    const auto nb = adjacency.neighbors(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] == u) throw Error(Errc::MalformedRecord, "self-loop at " + std::to_string(u));
      if (i > 0 && nb[i] <= nb[i - 1])
        throw Error(Errc::MalformedRecord, "unsorted or duplicate neighbor at " + std::to_string(u));
      if (!adjacency.has_edge(nb[i], u))
        throw Error(Errc::MalformedRecord, "asymmetric edge " + std::to_string(u) + "->" +
                                               std::to_string(nb[i]));
    }
  }
  const auto text_it = tables.find(Modality::text);
  if (text_it != tables.end() && text_it->second.rows() != nodes.size()) {
    throw Error(Errc::MissingEmbedding, "text table has " + std::to_string(text_it->second.rows()) +
                                            " rows for " + std::to_string(nodes.size()) + " nodes");
  }
  const auto image_it = tables.find(Modality::image);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeRecord& n = nodes[i];
    if (n.id != i) throw Error(Errc::MalformedRecord, "node at position " + std::to_string(i) +
                                                          " has id " + std::to_string(n.id));
    if (n.label < 0 || static_cast<std::size_t>(n.label) >= classes.size()) {
      throw Error(Errc::UnknownLabel, "node " + std::to_string(n.id) + " label " +
                                          std::to_string(n.label));
    }
    if (n.text.empty() && !n.image_row && !n.image_path) {
      throw Error(Errc::MalformedRecord, "node " + std::to_string(n.id) + " carries no attribute");
    }
    if (n.image_row) {
      if (image_it == tables.end() || *n.image_row >= image_it->second.rows()) {
        throw Error(Errc::MissingEmbedding, "node " + std::to_string(n.id) + " image_row " +
                                                std::to_string(*n.image_row) + " (modality image)");
      }
    }
  }
}

std::optional<std::filesystem::path> MultimodalGraph::image_file(NodeId v) const {
  const auto& p = nodes.at(v).image_path;
  if (!p) return std::nullopt;
  const std::filesystem::path path(*p);
  return path.is_absolute() || asset_root.empty() ? path : asset_root / path;
}

}  // namespace mmgl
