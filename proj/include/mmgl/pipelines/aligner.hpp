#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "mmgl/encoders/fusion.hpp"
#include "mmgl/graph/graph.hpp"
#include "mmgl/graph/neighbors.hpp"
#include "mmgl/pipelines/templates.hpp"
#include "mmgl/vlm/client.hpp"

namespace mmgl {

/// Text produced for one node by the aligner: image description, summary and
/// structure-aware summary.
struct AlignerArtifacts {
  NodeId node_id = 0;
  std::optional<std::string> t_i;
  std::optional<std::string> t_s;
  std::optional<std::string> t_ss;

  friend bool operator==(const AlignerArtifacts&, const AlignerArtifacts&) = default;
};

using AlignerArtifactMap = std::map<NodeId, AlignerArtifacts>;
using DescriptionMap = std::map<NodeId, std::string>;

/// Template domain of the graph. Throws UnknownDomain.
Domain graph_domain(const MultimodalGraph& graph);

struct AlignerOptions {
  /// Random hop-1 sample size for structural summaries.
  std::size_t neighbor_count = 5;
  std::uint64_t seed = 0;
  /// When set, neighbors are the similarity-ranked top-k instead of a random sample.
  std::optional<StructureSelectSpec> select;
};

PromptBundle image_description_prompt(const MultimodalGraph& graph, NodeId v);

/// Sends the image-description prompt for `v`. Throws NoImage.
std::string generate_image_description(VlmClient& client, const MultimodalGraph& graph, NodeId v);

/// Neighbors whose descriptions enter a structural summary, ascending id
/// (similarity order when opts.select is set).
std::vector<NodeId> aligner_neighbors(const MultimodalGraph& graph, NodeId v,
                                      const AlignerOptions& opts);

/// Neighbors lacking a description are left out; with none left the fallback
/// sentence is used. Throws MissingDescription when `v` has no description.
PromptBundle summary_prompt(const MultimodalGraph& graph, NodeId v,
                            const DescriptionMap& descriptions, bool structural,
                            const AlignerOptions& opts = {});

std::string summarize_multimodal(VlmClient& client, const MultimodalGraph& graph, NodeId v,
                                 const DescriptionMap& descriptions, bool structural,
                                 const AlignerOptions& opts = {});

/// Concatenated (optionally head-projected) text and image embeddings.
Tensor latent_align_features(const MultimodalGraph& graph, const ProjectionHeads* heads = nullptr);

/// Write-once directory of per-node JSON files {node_id, t_i, t_s, t_ss?},
/// named by a digest of everything that determines their content.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path dir);

  std::optional<AlignerArtifacts> load(const std::string& key) const;
  /// Keeps an existing file untouched.
  void save(const std::string& key, const AlignerArtifacts& artifacts) const;
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct AlignRunOptions {
  AlignerOptions aligner;
  bool structural = false;
};

/// Digest of the inputs that determine a node's artifacts.
std::string artifact_key(const MultimodalGraph& graph, NodeId v, const AlignRunOptions& opts,
                         const ClientConfig& cfg);

/// Descriptions for `nodes` (and, when structural, their aligner neighbors),
/// then summaries for every node that has a description. Calls fan out up to
/// the client's concurrency limit; stored artifacts are reused.
AlignerArtifactMap run_aligner(VlmClient& client, const MultimodalGraph& graph,
                               std::span<const NodeId> nodes, const AlignRunOptions& opts,
                               const ArtifactStore* store = nullptr);

}  // namespace mmgl
