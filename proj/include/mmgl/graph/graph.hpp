#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmgl/numerics/tensor.hpp"

namespace mmgl {

using NodeId = std::size_t;

enum class Modality { text, image };

std::string_view modality_name(Modality m) noexcept;
Modality parse_modality(std::string_view name);

/// Frozen per-modality embeddings (rows × dim). Text tables are indexed by
/// node id; image tables by NodeRecord::image_row.
struct EmbeddingTable {
  Modality modality = Modality::text;
  Tensor data;

  std::size_t rows() const noexcept { return data.rows(); }
  std::size_t dim() const noexcept { return data.cols(); }
};

struct NodeRecord {
  NodeId id = 0;
  std::string text;
  std::optional<std::size_t> image_row;
  std::optional<std::string> image_path;
  int label = 0;
};

struct EdgeStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/// Undirected adjacency in CSR form. Every edge is stored in both directions,
/// neighbor lists are sorted ascending, with no self-loops or duplicates.
class Adjacency {
 public:
  Adjacency() = default;

  /// Symmetrizes and deduplicates `edges`; self-loops are dropped.
  static Adjacency from_edges(std::size_t num_nodes,
                              std::span<const std::pair<NodeId, NodeId>> edges,
                              EdgeStats* stats = nullptr);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Number of undirected edges.
  std::size_t num_edges() const noexcept { return indices_.size() / 2; }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {indices_.data() + offsets_[v], degree(v)};
  }
  bool has_edge(NodeId u, NodeId v) const;
  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> indices_;
};

struct MultimodalGraph {
  std::vector<NodeRecord> nodes;
  Adjacency adjacency;
  std::vector<std::string> classes;
  std::map<Modality, EmbeddingTable> tables;
  /// Dataset domain tag (movies, toys, grocery, cds, arts, reddit); selects prompt templates.
  std::string domain;
  /// Base directory for relative NodeRecord::image_path values.
  std::filesystem::path asset_root;

  std::size_t num_nodes() const noexcept { return nodes.size(); }
  bool has_table(Modality m) const { return tables.contains(m); }
  const EmbeddingTable& table(Modality m) const;
  std::vector<int> labels() const;

  /// Throws on any violated invariant (asymmetric adjacency, label range,
  /// dangling embedding rows, node without any attribute).
  void validate() const;
  /// image_path of `v` resolved against asset_root (absolute paths unchanged).
  std::optional<std::filesystem::path> image_file(NodeId v) const;
};

}  // namespace mmgl
