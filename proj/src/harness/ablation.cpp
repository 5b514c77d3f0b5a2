#include "mmgl/harness/ablation.hpp"

#include <cstdio>

#include "json.hpp"

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

std::size_t mode_index(FusionMode mode) {
  for (std::size_t i = 0; i < kAblationModes.size(); ++i)
    if (kAblationModes[i] == mode) return i;
  throw Error(Errc::InvalidArgument, "unknown fusion mode");
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
  return buf;
}

}  // namespace

FeatureSet make_feature_set(const MultimodalGraph& graph, ModelKind kind, FusionMode mode,
                            const ProjectionHeads* heads) {
  if (!is_multimodal(kind)) return FeatureSet{{fuse_features(graph, {mode}, heads).features}};
  Tensor text = fuse_features(graph, {FusionMode::text_only}, heads).features;
  Tensor image = fuse_features(graph, {FusionMode::image_only}, heads).features;
  if (mode == FusionMode::text_only) image.fill(0.0f);
  if (mode == FusionMode::image_only) text.fill(0.0f);
  return FeatureSet{{std::move(text), std::move(image)}};
}

const AblationCell& AblationTable::cell(ModelKind model, FusionMode mode) const {
  const auto it = cells.find(model);
  if (it == cells.end()) throw Error(Errc::InvalidArgument, "model not in ablation table");
  return it->second[mode_index(mode)];
}

std::string AblationTable::to_markdown() const {
  std::string out = "| model | text | image | text+image |\n|---|---|---|---|\n";
  for (ModelKind m : models) {
    out += "| " + std::string(model_kind_name(m)) + " |";
    for (FusionMode mode : kAblationModes) {
      const auto& s = cell(m, mode).summary;
      out += " " + percent(s.mean);
      if (s.std) out += " ± " + percent(*s.std);
      out += " |";
    }
    out += "\n";
  }
  return out;
}

std::string AblationTable::to_json() const {
  nlohmann::ordered_json j;
  j["seeds"] = seeds;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (ModelKind m : models) {
    nlohmann::ordered_json row;
    row["model"] = model_kind_name(m);
    for (FusionMode mode : kAblationModes) {
      const auto& c = cell(m, mode);
      nlohmann::ordered_json jc;
      jc["mean"] = c.summary.mean;
      if (c.summary.std) jc["std"] = *c.summary.std;
      jc["per_seed"] = c.per_seed;
      row[std::string(fusion_mode_name(mode))] = jc;
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

AblationTable modality_ablation(const MultimodalGraph& graph, std::span<const ModelKind> models,
                                std::span<const std::uint64_t> seeds, const AblationOptions& opts) {
  if (!graph.has_table(Modality::text) || !graph.has_table(Modality::image)) {
    throw Error(Errc::ModalityUnavailable, "modality ablation needs text and image embeddings");
  }
  if (models.empty() || seeds.empty()) throw Error(Errc::Empty, "ablation needs models and seeds");
  const auto split = split_nodes(graph, opts.ratios, opts.split_seed);
  AblationTable table;
  table.models.assign(models.begin(), models.end());
  table.seeds.assign(seeds.begin(), seeds.end());
  for (ModelKind m : models) {
    auto& row = table.cells[m];
    for (std::size_t i = 0; i < kAblationModes.size(); ++i) {
      const FeatureSet fs = make_feature_set(graph, m, kAblationModes[i]);
      for (std::uint64_t seed : seeds) {
        GnnConfig cfg = opts.gnn;
        cfg.model = m;
        cfg.seed = seed;
        const auto trained = train_node_classifier(graph, fs, split, cfg);
        row[i].per_seed.push_back(trained.metrics.test_accuracy);
      }
      row[i].summary = mean_std(row[i].per_seed);
    }
  }
  return table;
}

}  // namespace mmgl
