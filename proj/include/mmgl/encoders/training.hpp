#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mmgl/encoders/fusion.hpp"

namespace mmgl {

/// Contrastive fine-tuning settings. Defaults are the CLIP-F-S values:
/// Adam, lr 1e-5, 5 sampled neighbors, 1 epoch, batch 16, temperature 0.5.
struct ContrastiveConfig {
  double tau = 0.5;
  std::size_t neighbors = 5;
  std::size_t batch_size = 16;
  double lr = 1e-5;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EncoderTrainingReport {
  std::vector<double> loss_curve;  // one entry per optimizer step
  /// Structure-aware: mean cosine over all edges of projected [E_T ‖ E_I].
  /// Cross-modal: mean cosine of each node's projected (text, image) pair.
  double cosine_before = 0.0;
  double cosine_after = 0.0;
  std::size_t steps = 0;
  std::size_t skipped_nodes = 0;  // isolated anchors / nodes without an image row
};

struct TrainedEncoder {
  ProjectionHeads heads;
  EncoderTrainingReport report;
};

/// Projected concatenated embeddings [X_T·W_T ‖ X_I·W_I] for every node.
Tensor project_concat(const MultimodalGraph& graph, const ProjectionHeads& heads);

/// Mean cosine between projected concatenated embeddings across all edges.
double mean_neighbor_cosine(const MultimodalGraph& graph, const ProjectionHeads& heads);
/// Mean cosine between each image-bearing node's projected text and image rows.
double mean_pair_cosine(const MultimodalGraph& graph, const ProjectionHeads& heads);

/// Structure-aware variant: each anchor's positive is one of its `neighbors`
/// sampled hop-1 neighbors, redrawn every epoch; negatives are the other
/// in-batch anchors. `anchors` restricts training nodes (default: all).
/// Errors: ModalityUnavailable, EmptyTrainSet.
TrainedEncoder train_structure_aware_encoder(const MultimodalGraph& graph, const ContrastiveConfig& cfg,
                                             std::optional<std::span<const NodeId>> anchors = std::nullopt);

/// CLIP-style cross-modal alignment of per-node (text, image) pairs; graph
/// structure unused. A trailing singleton batch is folded into the previous
/// one; batch_size 1 surfaces DegenerateBatch from the loss.
TrainedEncoder train_pvlm_f(const MultimodalGraph& graph, const ContrastiveConfig& cfg,
                            std::optional<std::span<const NodeId>> nodes = std::nullopt);

/// Checkpoint: manifest.json (dims, seed, config echo) plus one EMB1 file per head.
void save_heads(const std::filesystem::path& dir, const ProjectionHeads& heads, const ContrastiveConfig& cfg,
                std::string_view variant);
ProjectionHeads load_heads(const std::filesystem::path& dir);

}  // namespace mmgl
