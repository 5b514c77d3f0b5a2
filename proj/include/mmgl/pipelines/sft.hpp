#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mmgl/graph/split.hpp"
#include "mmgl/pipelines/predictor.hpp"

namespace mmgl {

struct SftRecord {
  /// User turn without the answer line.
  PromptBundle prompt;
  /// "Assistant: <label>".
  std::string target;
  std::string label;
  NodeId node_id = 0;
  std::vector<NodeId> neighbors;
};

struct SftExportOptions {
  PredictorPromptOptions prompt;
  /// Defaults to the graph's class names.
  std::vector<std::string> candidates;
};

SftRecord make_sft_record(const PredictionPromptBuilder& builder, NodeId v);

/// One JSON line: {"messages", "images", "target", "node_id", "neighbors"}.
/// Images appear in the user message as "<image>".
std::string sft_record_json(const SftRecord& record);

/// Writes one record per train node, in ascending id order. Returns the count.
std::size_t export_sft_dataset(const MultimodalGraph& graph, const SplitAssignment& split,
                               const SftExportOptions& opts, const std::filesystem::path& out_path);

}  // namespace mmgl
