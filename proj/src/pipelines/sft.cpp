#include "mmgl/pipelines/sft.hpp"

#include <fstream>

#include "json.hpp"

#include "mmgl/error.hpp"

namespace mmgl {

SftRecord make_sft_record(const PredictionPromptBuilder& builder, NodeId v) {
  const auto& graph = builder.graph();
  const int label = graph.nodes.at(v).label;
  if (label < 0 || static_cast<std::size_t>(label) >= graph.classes.size()) {
    throw Error(Errc::LabelOutOfRange, "node " + std::to_string(v) + " label " + std::to_string(label));
  }
  SftRecord r;
  r.node_id = v;
  r.label = graph.classes[label];
  r.prompt = builder.build(v);
  r.target = "Assistant: " + r.label;
  r.neighbors = builder.neighbors(v);
  return r;
}

std::string sft_record_json(const SftRecord& r) {
  nlohmann::ordered_json j;
  j["messages"] = nlohmann::ordered_json::array(
      {{{"role", "user"}, {"content", r.prompt.flatten("<image>")}},
       {{"role", "assistant"}, {"content", r.label}}});
  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const auto& p : r.prompt.image_paths()) images.push_back(p.generic_string());
  j["images"] = images;
  j["target"] = r.target;
  j["node_id"] = r.node_id;
  j["neighbors"] = r.neighbors;
  return j.dump();
}

std::size_t export_sft_dataset(const MultimodalGraph& graph, const SplitAssignment& split,
                               const SftExportOptions& opts, const std::filesystem::path& out_path) {
  const PredictionPromptBuilder builder(graph, opts.candidates.empty() ? graph.classes : opts.candidates,
                                        opts.prompt);
  std::vector<std::string> lines;
  lines.reserve(split.train.size());
  for (NodeId v : split.train) lines.push_back(sft_record_json(make_sft_record(builder, v)));

  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + out_path.string());
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw Error(Errc::Io, "write failed for " + out_path.string());
  return lines.size();
}

}  // namespace mmgl
