#include "mmgl/encoders/fusion.hpp"

#include <cmath>

#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/numerics/random.hpp"

namespace mmgl {
namespace {

Tensor uniform_init(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor w(fan_in, fan_out);
  for (auto& v : w.values()) v = static_cast<float>(rng.uniform(-bound, bound));
  return w;
}

}  // namespace

std::string_view fusion_mode_name(FusionMode mode) noexcept {
  switch (mode) {
    case FusionMode::text_only: return "text";
    case FusionMode::image_only: return "image";
    case FusionMode::concat: return "text+image";
  }
  return "?";
}

FusionMode parse_fusion_mode(std::string_view name) {
  if (name == "text" || name == "text_only") return FusionMode::text_only;
  if (name == "image" || name == "image_only") return FusionMode::image_only;
  if (name == "concat" || name == "text+image") return FusionMode::concat;
  throw Error(Errc::InvalidArgument, "unknown fusion mode '" + std::string(name) + "'");
}

ProjectionHeads ProjectionHeads::initialize(std::size_t text_dim, std::size_t image_dim,
                                            std::uint64_t seed) {
  if (text_dim == 0 || image_dim == 0) throw Error(Errc::InvalidArgument, "projection heads need positive dims");
  const std::size_t proj = std::min(text_dim, image_dim);
  Rng rng(seed);
  Tensor wt = uniform_init(text_dim, proj, rng);
  Tensor wi = uniform_init(image_dim, proj, rng);
  return from_weights(std::move(wt), std::move(wi));
}

ProjectionHeads ProjectionHeads::from_weights(Tensor text_weight, Tensor image_weight) {
  if (text_weight.cols() != image_weight.cols()) {
    throw Error(Errc::ShapeMismatch, "projection heads output dims differ: " + text_weight.shape_string() +
                                         " vs " + image_weight.shape_string());
  }
  return ProjectionHeads{Parameter("head.text", std::move(text_weight)),
                         Parameter("head.image", std::move(image_weight))};
}

Tensor modality_matrix(const MultimodalGraph& graph, Modality modality, std::size_t* zero_filled) {
  const EmbeddingTable& table = graph.table(modality);
  std::size_t missing = 0;
  Tensor out(graph.num_nodes(), table.dim());
  if (modality == Modality::text) {
    if (table.rows() != graph.num_nodes()) {
      throw Error(Errc::MissingEmbedding, "text table has " + std::to_string(table.rows()) +
                                              " rows for " + std::to_string(graph.num_nodes()) + " nodes");
    }
    out = table.data;
  } else {
    for (const NodeRecord& n : graph.nodes) {
      if (!n.image_row) {
        ++missing;
        continue;
      }
      const auto src = table.data.row(*n.image_row);
      std::copy(src.begin(), src.end(), out.row(n.id).begin());
    }
  }
  if (zero_filled) *zero_filled = missing;
  return out;
}

FusedFeatures fuse_features(const MultimodalGraph& graph, const FusionSpec& spec,
                            const ProjectionHeads* heads) {
  FusedFeatures out;
  auto project = [&](Tensor x, const Parameter* head) {
    if (!head) return x;
    if (head->value.rows() != x.cols()) {
      throw Error(Errc::ShapeMismatch, "head " + head->name + " expects dim " +
                                           std::to_string(head->value.rows()) + ", features have " +
                                           std::to_string(x.cols()));
    }
    return matmul(x, head->value);
  };
  switch (spec.mode) {
    case FusionMode::text_only:
      out.features = project(modality_matrix(graph, Modality::text), heads ? &heads->text : nullptr);
      break;
    case FusionMode::image_only:
      out.features = project(modality_matrix(graph, Modality::image, &out.zero_filled_rows),
                             heads ? &heads->image : nullptr);
      break;
    case FusionMode::concat: {
      if (!graph.has_table(Modality::text) || !graph.has_table(Modality::image)) {
        throw Error(Errc::ModalityUnavailable, "concat fusion needs both text and image tables");
      }
      Tensor t = project(modality_matrix(graph, Modality::text), heads ? &heads->text : nullptr);
      Tensor i = project(modality_matrix(graph, Modality::image, &out.zero_filled_rows),
                         heads ? &heads->image : nullptr);
      out.features = concat_cols(t, i);
      break;
    }
  }
  return out;
}

Tensor similarity_features(const MultimodalGraph& graph, SimilaritySource source) {
  switch (source) {
    case SimilaritySource::text: return modality_matrix(graph, Modality::text);
    case SimilaritySource::image: return modality_matrix(graph, Modality::image);
    case SimilaritySource::fused: {
      if (graph.has_table(Modality::text) && graph.has_table(Modality::image))
        return fuse_features(graph, {FusionMode::concat}).features;
      if (graph.has_table(Modality::text)) return modality_matrix(graph, Modality::text);
      return modality_matrix(graph, Modality::image);
    }
  }
  throw Error(Errc::InvalidArgument, "unknown similarity source");
}

}  // namespace mmgl
