#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmgl/graph/graph.hpp"
#include "mmgl/graph/neighbors.hpp"
#include "mmgl/pipelines/aligner.hpp"
#include "mmgl/vlm/client.hpp"

namespace mmgl {

/// Neighbor attributes included in the predictor prompt.
enum class StructureMode { none, text, image, both };

std::string_view structure_mode_name(StructureMode m) noexcept;
StructureMode parse_structure_mode(std::string_view name);

struct PredictorPromptOptions {
  StructureMode structure = StructureMode::none;
  StructureSelectSpec select;
  /// Use the aligner summary (T^SS, else T^S) as the text when one exists.
  bool use_summaries = false;
};

/// Renders predictor prompts for one graph. Neighbor similarity rows are
/// computed once at construction.
class PredictionPromptBuilder {
 public:
  /// Throws UnknownDomain, InvalidArgument on an empty candidate list.
  PredictionPromptBuilder(const MultimodalGraph& graph, std::vector<std::string> candidates,
                          PredictorPromptOptions opts = {},
                          const AlignerArtifactMap* artifacts = nullptr);

  /// Top-k neighbors listed in the prompt (empty when structure is none).
  std::vector<NodeId> neighbors(NodeId v) const;
  /// Throws MissingImage when the target, or a listed neighbor whose picture
  /// is shown, has no image.
  PromptBundle build(NodeId v, const std::optional<std::string>& sft_label = std::nullopt) const;

  const std::vector<std::string>& candidates() const { return candidates_; }
  const PredictorPromptOptions& options() const { return opts_; }
  const MultimodalGraph& graph() const { return graph_; }

 private:
  std::string text_for(NodeId v) const;
  std::filesystem::path image_for(NodeId v) const;

  const MultimodalGraph& graph_;
  std::vector<std::string> candidates_;
  PredictorPromptOptions opts_;
  const AlignerArtifactMap* artifacts_;
  Domain domain_;
  Tensor similarity_;
};

PromptBundle build_prediction_prompt(const MultimodalGraph& graph, NodeId v,
                                     const std::vector<std::string>& candidates,
                                     const PredictorPromptOptions& opts = {},
                                     const AlignerArtifactMap* artifacts = nullptr,
                                     const std::optional<std::string>& sft_label = std::nullopt);

/// Lowercase, punctuation removed, whitespace collapsed and trimmed.
std::string normalize_label_text(std::string_view text);

/// Index of the candidate named by `response`: an exact normalized match,
/// else the unique candidate contained in it. Throws Ambiguous, Unparseable,
/// or InvalidArgument for empty or colliding candidates.
std::size_t parse_label(std::string_view response, const std::vector<std::string>& candidates);

/// First train node of each class in class order, at most `budget` of them.
std::vector<NodeId> select_icl_exemplars(const MultimodalGraph& graph,
                                         std::span<const NodeId> pool, std::size_t budget);

/// Appended once when a response cannot be parsed and retries are enabled.
inline constexpr std::string_view kAnswerInstruction =
    "\n\nAnswer with exactly one category name from the options above.";

struct PredictOptions {
  PredictorPromptOptions prompt;
  /// Exemplars prepended to every prompt, each followed by its answer line.
  std::vector<NodeId> icl_exemplars;
  bool retry_with_instruction = false;
  /// Worker threads; 0 uses the client's concurrency limit.
  unsigned concurrency = 0;
};

/// Exact bundle predict_nodes sends for `v`: exemplar prefix, then the target prompt.
PromptBundle compose_prediction_bundle(const PredictionPromptBuilder& builder, NodeId v,
                                       std::span<const NodeId> icl_exemplars);

enum class PredictionStatus { ok, ambiguous, unparseable, failed };

std::string_view prediction_status_name(PredictionStatus s) noexcept;

struct NodePrediction {
  NodeId node = 0;
  int gold = -1;
  /// Class id of the parsed answer, or -1.
  int predicted = -1;
  std::string response;
  PredictionStatus status = PredictionStatus::failed;
  std::string error;
  bool retried = false;

  bool correct() const noexcept { return status == PredictionStatus::ok && predicted == gold; }
};

struct PredictionRun {
  std::vector<NodePrediction> predictions;  // same order as the requested nodes
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t unparseable = 0;  // ambiguous answers included
  std::size_t failed = 0;
};

/// Prompts, queries and scores every node. Per-node failures are recorded,
/// never thrown. Candidate names must be class names of `graph`.
PredictionRun predict_nodes(VlmClient& client, const MultimodalGraph& graph,
                            std::span<const NodeId> nodes, const std::vector<std::string>& candidates,
                            const PredictOptions& opts = {});

}  // namespace mmgl
