#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mmgl/encoders/fusion.hpp"
#include "mmgl/gnn/trainer.hpp"
#include "mmgl/harness/metrics.hpp"

namespace mmgl {

/// Inputs for `kind` under `mode`. Multimodal models always get {text, image};
/// the modality left out by a unimodal mode is replaced by zeros.
FeatureSet make_feature_set(const MultimodalGraph& graph, ModelKind kind, FusionMode mode,
                            const ProjectionHeads* heads = nullptr);

inline constexpr std::array<FusionMode, 3> kAblationModes = {FusionMode::text_only, FusionMode::image_only,
                                                             FusionMode::concat};

struct AblationCell {
  std::vector<double> per_seed;  // test accuracy
  MeanStd summary;
};

struct AblationTable {
  std::vector<ModelKind> models;
  std::vector<std::uint64_t> seeds;
  /// cells[model][mode index in kAblationModes]
  std::map<ModelKind, std::array<AblationCell, 3>> cells;

  const AblationCell& cell(ModelKind model, FusionMode mode) const;
  /// Model rows by text / image / text+image columns; a "± std" suffix only
  /// with two or more seeds.
  std::string to_markdown() const;
  std::string to_json() const;
};

struct AblationOptions {
  GnnConfig gnn;  // model and seed are overridden per cell
  SplitRatios ratios;
  std::uint64_t split_seed = 0;
};

/// Trains one classifier per (model, mode, seed) and averages test accuracy
/// over seeds. Throws ModalityUnavailable unless both tables are present.
AblationTable modality_ablation(const MultimodalGraph& graph, std::span<const ModelKind> models,
                                std::span<const std::uint64_t> seeds, const AblationOptions& opts = {});

}  // namespace mmgl
