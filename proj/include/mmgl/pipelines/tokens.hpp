#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mmgl/graph/graph.hpp"
#include "mmgl/graph/neighbors.hpp"
#include "mmgl/numerics/optim.hpp"

namespace mmgl {

/// Linear map from embedding space into the language model's token space.
struct TokenProjector {
  Parameter weight;  // d_in × d_llm

  std::size_t d_in() const noexcept { return weight.value.rows(); }
  std::size_t d_llm() const noexcept { return weight.value.cols(); }

  static TokenProjector initialize(std::size_t d_in, std::size_t d_llm, std::uint64_t seed);
  static TokenProjector from_weight(Tensor weight);
};

/// z = h·W. Throws ShapeMismatch.
std::vector<float> project_to_token_space(std::span<const float> h, const TokenProjector& proj);
/// Row-wise projection of an n × d_in matrix.
Tensor project_to_token_space(const Tensor& rows, const TokenProjector& proj);

/// Column mean of P patch embeddings. Throws EmptyInput when P = 0.
std::vector<float> neighbor_visual_token(const Tensor& patch_embeddings);
/// Column mean of T final-layer token embeddings. Throws EmptyInput when T = 0.
std::vector<float> neighbor_text_token(const Tensor& token_embeddings);

/// Supplier of per-node patch (image) or token (text) embedding matrices.
class TokenSource {
 public:
  virtual ~TokenSource() = default;
  /// Throws ModalityUnavailable when the matrix does not exist.
  virtual Tensor tokens(NodeId v, Modality m) const = 0;
};

/// Reads `<root>/<text|image>/<node id>.emb` EMB1 files.
class Emb1TokenSource final : public TokenSource {
 public:
  explicit Emb1TokenSource(std::filesystem::path root) : root_(std::move(root)) {}
  Tensor tokens(NodeId v, Modality m) const override;
  std::filesystem::path path_for(NodeId v, Modality m) const;

 private:
  std::filesystem::path root_;
};

class InMemoryTokenSource final : public TokenSource {
 public:
  void set(NodeId v, Modality m, Tensor t) { items_[{m, v}] = std::move(t); }
  Tensor tokens(NodeId v, Modality m) const override;

 private:
  std::map<std::pair<Modality, NodeId>, Tensor> items_;
};

enum class TokenModality { text, image, both };

/// per_neighbor: one pooled row per neighbor. across_neighborhood: a single
/// row pooled over every neighbor's rows together.
enum class TokenPooling { per_neighbor, across_neighborhood };

struct StructureTokenBlock {
  std::vector<NodeId> neighbor_ids;  // similarity rank order
  std::optional<Tensor> visual_tokens;
  std::optional<Tensor> text_tokens;
  TokenPooling pooling = TokenPooling::per_neighbor;
};

/// Pooled neighbor tokens for the top-k neighbors of `v` ranked on
/// `similarity` rows. Throws ModalityUnavailable.
StructureTokenBlock assemble_structure_tokens(const MultimodalGraph& graph, NodeId v,
                                              const StructureSelectSpec& spec,
                                              const Tensor& similarity, TokenModality modality,
                                              const TokenSource& sources,
                                              TokenPooling pooling = TokenPooling::per_neighbor);
StructureTokenBlock assemble_structure_tokens(const MultimodalGraph& graph, NodeId v,
                                              const StructureSelectSpec& spec,
                                              TokenModality modality, const TokenSource& sources,
                                              TokenPooling pooling = TokenPooling::per_neighbor);

}  // namespace mmgl
