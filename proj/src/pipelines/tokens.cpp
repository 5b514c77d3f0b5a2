#include "mmgl/pipelines/tokens.hpp"

#include <cmath>

#include "mmgl/encoders/fusion.hpp"
#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/numerics/random.hpp"
#include "mmgl/numerics/tensor_io.hpp"

namespace mmgl {
namespace {

std::vector<float> pooled(const Tensor& rows, const char* what) {
  if (rows.rows() == 0 || rows.cols() == 0) {
    throw Error(Errc::EmptyInput, std::string(what) + " matrix has no rows");
  }
  const auto means = column_means(rows);
  return {means.values().begin(), means.values().end()};
}

}  // namespace

TokenProjector TokenProjector::initialize(std::size_t d_in, std::size_t d_llm, std::uint64_t seed) {
  if (d_in == 0 || d_llm == 0) throw Error(Errc::InvalidArgument, "token projector needs positive dims");
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  Tensor w(d_in, d_llm);
  for (auto& x : w.values()) x = static_cast<float>(rng.uniform(-bound, bound));
  return from_weight(std::move(w));
}

TokenProjector TokenProjector::from_weight(Tensor weight) {
  if (weight.rows() == 0 || weight.cols() == 0) {
    throw Error(Errc::InvalidArgument, "token projector weight is empty");
  }
  return TokenProjector{Parameter("token_projector", std::move(weight))};
}

std::vector<float> project_to_token_space(std::span<const float> h, const TokenProjector& proj) {
  const Tensor z = project_to_token_space(Tensor::row_vector(h), proj);
  return {z.values().begin(), z.values().end()};
}

Tensor project_to_token_space(const Tensor& rows, const TokenProjector& proj) {
  if (rows.cols() != proj.d_in()) {
    throw Error(Errc::ShapeMismatch, "embedding width " + std::to_string(rows.cols()) +
                                         " does not match projector input " +
                                         std::to_string(proj.d_in()));
  }
  return matmul(rows, proj.weight.value);
}

std::vector<float> neighbor_visual_token(const Tensor& patch_embeddings) {
  return pooled(patch_embeddings, "patch embedding");
}

std::vector<float> neighbor_text_token(const Tensor& token_embeddings) {
  return pooled(token_embeddings, "token embedding");
}

std::filesystem::path Emb1TokenSource::path_for(NodeId v, Modality m) const {
  return root_ / std::string(modality_name(m)) / (std::to_string(v) + ".emb");
}

Tensor Emb1TokenSource::tokens(NodeId v, Modality m) const {
  const auto path = path_for(v, m);
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::ModalityUnavailable, "no " + std::string(modality_name(m)) +
                                               " tokens for node " + std::to_string(v) + " at " +
                                               path.string());
  }
  return read_emb1(path);
}

Tensor InMemoryTokenSource::tokens(NodeId v, Modality m) const {
  const auto it = items_.find({m, v});
  if (it == items_.end()) {
    throw Error(Errc::ModalityUnavailable,
                "no " + std::string(modality_name(m)) + " tokens for node " + std::to_string(v));
  }
  return it->second;
}

StructureTokenBlock assemble_structure_tokens(const MultimodalGraph& graph, NodeId v,
                                              const StructureSelectSpec& spec,
                                              const Tensor& similarity, TokenModality modality,
                                              const TokenSource& sources, TokenPooling pooling) {
  StructureTokenBlock block;
  block.pooling = pooling;
  block.neighbor_ids = top_k_similar_neighbors(graph, v, spec, similarity);

  auto build = [&](Modality m) -> Tensor {
    std::vector<Tensor> mats;
    for (NodeId u : block.neighbor_ids) mats.push_back(sources.tokens(u, m));
    if (mats.empty()) return Tensor();
    const std::size_t d = mats.front().cols();
    for (const auto& t : mats) {
      if (t.cols() != d) {
        throw Error(Errc::ShapeMismatch, "neighbor token widths differ: " +
                                             std::to_string(t.cols()) + " vs " + std::to_string(d));
      }
    }
    if (pooling == TokenPooling::per_neighbor) {
      Tensor out(mats.size(), d);
      for (std::size_t i = 0; i < mats.size(); ++i) {
        const auto row = pooled(mats[i], modality_name(m) == "image" ? "patch embedding"
                                                                      : "token embedding");
        std::copy(row.begin(), row.end(), out.row(i).begin());
      }
      return out;
    }
    std::size_t total = 0;
    for (const auto& t : mats) total += t.rows();
    Tensor all(total, d);
    std::size_t r = 0;
    for (const auto& t : mats)
      for (std::size_t i = 0; i < t.rows(); ++i, ++r)
        std::copy(t.row(i).begin(), t.row(i).end(), all.row(r).begin());
    return Tensor::row_vector(pooled(all, "neighborhood embedding"));
  };

  if (modality != TokenModality::text) block.visual_tokens = build(Modality::image);
  if (modality != TokenModality::image) block.text_tokens = build(Modality::text);
  return block;
}

StructureTokenBlock assemble_structure_tokens(const MultimodalGraph& graph, NodeId v,
                                              const StructureSelectSpec& spec,
                                              TokenModality modality, const TokenSource& sources,
                                              TokenPooling pooling) {
  return assemble_structure_tokens(graph, v, spec, similarity_features(graph, spec.similarity),
                                   modality, sources, pooling);
}

}  // namespace mmgl
