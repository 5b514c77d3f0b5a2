#include "mmgl/pipelines/predictor.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mmgl/encoders/fusion.hpp"
#include "mmgl/error.hpp"
#include "parallel.hpp"

namespace mmgl {
namespace {

void append(PromptBundle& into, const PromptBundle& from) {
  for (const auto& seg : from.segments) {
    const auto* t = std::get_if<TextSegment>(&seg);
    if (t && !into.segments.empty()) {
      if (auto* prev = std::get_if<TextSegment>(&into.segments.back())) {
        prev->text += t->text;
        continue;
      }
    }
    into.segments.push_back(seg);
  }
}

}  // namespace

std::string_view structure_mode_name(StructureMode m) noexcept {
  switch (m) {
    case StructureMode::none: return "none";
    case StructureMode::text: return "text";
    case StructureMode::image: return "image";
    case StructureMode::both: return "both";
  }
  return "unknown";
}

StructureMode parse_structure_mode(std::string_view name) {
  for (auto m : {StructureMode::none, StructureMode::text, StructureMode::image, StructureMode::both}) {
    if (structure_mode_name(m) == name) return m;
  }
  throw Error(Errc::InvalidArgument, "unknown structure mode '" + std::string(name) + "'");
}

PredictionPromptBuilder::PredictionPromptBuilder(const MultimodalGraph& graph,
                                                 std::vector<std::string> candidates,
                                                 PredictorPromptOptions opts,
                                                 const AlignerArtifactMap* artifacts)
    : graph_(graph),
      candidates_(std::move(candidates)),
      opts_(opts),
      artifacts_(artifacts),
      domain_(graph_domain(graph)) {
  if (candidates_.empty()) throw Error(Errc::InvalidArgument, "candidate set is empty");
  if (opts_.structure != StructureMode::none) {
    opts_.select.validate();
    similarity_ = similarity_features(graph_, opts_.select.similarity);
  }
}

std::vector<NodeId> PredictionPromptBuilder::neighbors(NodeId v) const {
  if (opts_.structure == StructureMode::none) return {};
  return top_k_similar_neighbors(graph_, v, opts_.select, similarity_);
}

std::string PredictionPromptBuilder::text_for(NodeId v) const {
  if (opts_.use_summaries && artifacts_) {
    if (const auto it = artifacts_->find(v); it != artifacts_->end()) {
      if (it->second.t_ss) return *it->second.t_ss;
      if (it->second.t_s) return *it->second.t_s;
    }
  }
  return graph_.nodes[v].text;
}

std::filesystem::path PredictionPromptBuilder::image_for(NodeId v) const {
  const auto path = graph_.image_file(v);
  if (!path) throw Error(Errc::MissingImage, "node " + std::to_string(v) + " has no image");
  return *path;
}

PromptBundle PredictionPromptBuilder::build(NodeId v, const std::optional<std::string>& sft_label) const {
  if (v >= graph_.num_nodes()) throw Error(Errc::InvalidNode, "node " + std::to_string(v));
  TemplateBindings b;
  b.image = image_for(v);
  b.text_information = text_for(v);
  b.candidates = join_candidates(candidates_);
  b.truth_label = sft_label;
  const bool structural = opts_.structure != StructureMode::none;
  if (structural) {
    b.neighbor_fields = opts_.structure == StructureMode::text    ? NeighborFields::text
                        : opts_.structure == StructureMode::image ? NeighborFields::image
                                                                  : NeighborFields::both;
    for (NodeId u : neighbors(v)) {
      NeighborSlot slot;
      if (b.neighbor_fields != NeighborFields::image) slot.text = text_for(u);
      if (b.neighbor_fields != NeighborFields::text) slot.image = image_for(u);
      b.neighbors.push_back(std::move(slot));
    }
  }
  return render_bundle({domain_, structural ? TemplateKind::predictor_structural : TemplateKind::predictor},
                       b);
}

PromptBundle build_prediction_prompt(const MultimodalGraph& graph, NodeId v,
                                     const std::vector<std::string>& candidates,
                                     const PredictorPromptOptions& opts,
                                     const AlignerArtifactMap* artifacts,
                                     const std::optional<std::string>& sft_label) {
  return PredictionPromptBuilder(graph, candidates, opts, artifacts).build(v, sft_label);
}

std::string normalize_label_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::ispunct(c)) continue;
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::size_t parse_label(std::string_view response, const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw Error(Errc::InvalidArgument, "candidate set is empty");
  std::vector<std::string> norm;
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    norm.push_back(normalize_label_text(c));
    if (norm.back().empty() || !seen.insert(norm.back()).second) {
      throw Error(Errc::InvalidArgument, "candidate '" + c + "' is empty or collides after normalization");
    }
  }
  const std::string r = normalize_label_text(response);
  for (std::size_t i = 0; i < norm.size(); ++i) {
    if (norm[i] == r) return i;
  }
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    if (r.find(norm[i]) != std::string::npos) hits.push_back(i);
  }
  if (hits.size() == 1) return hits.front();
  if (hits.empty()) throw Error(Errc::Unparseable, "no candidate found in response '" + std::string(response) + "'");
  std::string names;
  for (std::size_t i : hits) names += (names.empty() ? "" : ", ") + candidates[i];
  throw Error(Errc::Ambiguous, "response names several candidates: " + names);
}

std::vector<NodeId> select_icl_exemplars(const MultimodalGraph& graph, std::span<const NodeId> pool,
                                         std::size_t budget) {
  std::vector<NodeId> sorted(pool.begin(), pool.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<NodeId> out;
  for (std::size_t c = 0; c < graph.classes.size() && out.size() < budget; ++c) {
    for (NodeId v : sorted) {
      if (graph.nodes.at(v).label == static_cast<int>(c)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

PromptBundle compose_prediction_bundle(const PredictionPromptBuilder& builder, NodeId v,
                                       std::span<const NodeId> icl_exemplars) {
  const auto& graph = builder.graph();
  PromptBundle bundle;
  for (NodeId e : icl_exemplars) {
    append(bundle, builder.build(e, graph.classes.at(graph.nodes.at(e).label)));
    append(bundle, PromptBundle().text("\n\n"));
  }
  append(bundle, builder.build(v));
  return bundle;
}

std::string_view prediction_status_name(PredictionStatus s) noexcept {
  switch (s) {
    case PredictionStatus::ok: return "ok";
    case PredictionStatus::ambiguous: return "ambiguous";
    case PredictionStatus::unparseable: return "unparseable";
    case PredictionStatus::failed: return "failed";
  }
  return "unknown";
}

PredictionRun predict_nodes(VlmClient& client, const MultimodalGraph& graph,
                            std::span<const NodeId> nodes, const std::vector<std::string>& candidates,
                            const PredictOptions& opts) {
  const PredictionPromptBuilder builder(graph, candidates, opts.prompt);
  std::vector<int> class_of(candidates.size(), -1);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto it = std::find(graph.classes.begin(), graph.classes.end(), candidates[i]);
    if (it != graph.classes.end()) class_of[i] = static_cast<int>(it - graph.classes.begin());
  }

  PredictionRun run;
  run.predictions.resize(nodes.size());
  const unsigned workers = opts.concurrency ? opts.concurrency : client.config().concurrency_limit;
  detail::parallel_for(nodes.size(), workers, [&](std::size_t i) {
    NodePrediction& p = run.predictions[i];
    p.node = nodes[i];
    try {
      p.gold = graph.nodes.at(p.node).label;
      PromptBundle bundle = compose_prediction_bundle(builder, p.node, opts.icl_exemplars);
      for (int attempt = 0;; ++attempt) {
        p.response = client.complete(bundle);
        try {
          p.predicted = class_of[parse_label(p.response, candidates)];
          p.status = PredictionStatus::ok;
          p.error.clear();
          break;
        } catch (const Error& e) {
          if (e.code() != Errc::Ambiguous && e.code() != Errc::Unparseable) throw;
          p.status = e.code() == Errc::Ambiguous ? PredictionStatus::ambiguous
                                                 : PredictionStatus::unparseable;
          p.error = e.what();
          if (!opts.retry_with_instruction || attempt > 0) break;
          append(bundle, PromptBundle().text(std::string(kAnswerInstruction)));
          p.retried = true;
        }
      }
    } catch (const std::exception& e) {
      p.status = PredictionStatus::failed;
      p.predicted = -1;
      p.error = e.what();
    }
  });

  for (const auto& p : run.predictions) {
    if (p.correct()) ++run.correct;
    if (p.status == PredictionStatus::ambiguous || p.status == PredictionStatus::unparseable) ++run.unparseable;
    if (p.status == PredictionStatus::failed) ++run.failed;
  }
  run.accuracy = nodes.empty() ? 0.0 : static_cast<double>(run.correct) / nodes.size();
  return run;
}

}  // namespace mmgl
