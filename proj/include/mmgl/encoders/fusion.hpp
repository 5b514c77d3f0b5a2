#pragma once

#include <cstdint>

#include "mmgl/graph/graph.hpp"
#include "mmgl/graph/neighbors.hpp"
#include "mmgl/numerics/optim.hpp"

namespace mmgl {

enum class FusionMode { text_only, image_only, concat };

std::string_view fusion_mode_name(FusionMode mode) noexcept;
FusionMode parse_fusion_mode(std::string_view name);

struct FusionSpec {
  FusionMode mode = FusionMode::concat;
};

/// One linear map per modality into a shared space of width
/// min(d_text, d_image). These stand in for fine-tuning the frozen backbone.
struct ProjectionHeads {
  Parameter text;   // d_text × d_proj
  Parameter image;  // d_image × d_proj

  std::size_t text_dim() const noexcept { return text.value.rows(); }
  std::size_t image_dim() const noexcept { return image.value.rows(); }
  std::size_t proj_dim() const noexcept { return text.value.cols(); }

  /// Uniform in ±1/sqrt(fan_in), seeded.
  static ProjectionHeads initialize(std::size_t text_dim, std::size_t image_dim, std::uint64_t seed);
  static ProjectionHeads from_weights(Tensor text_weight, Tensor image_weight);
};

/// |V| × d matrix for one modality. Text rows follow node ids; image rows
/// follow NodeRecord::image_row, and nodes without one get a zero row
/// (counted in `zero_filled`).
Tensor modality_matrix(const MultimodalGraph& graph, Modality modality,
                       std::size_t* zero_filled = nullptr);

struct FusedFeatures {
  Tensor features;
  std::size_t zero_filled_rows = 0;
};

/// text_only / image_only return the (optionally head-projected) modality
/// matrix; concat returns [E_T ‖ E_I] per node. Throws ModalityUnavailable
/// when a required table is absent.
FusedFeatures fuse_features(const MultimodalGraph& graph, const FusionSpec& spec,
                            const ProjectionHeads* heads = nullptr);

/// Rows used to rank neighbors by similarity.
Tensor similarity_features(const MultimodalGraph& graph, SimilaritySource source);

}  // namespace mmgl
