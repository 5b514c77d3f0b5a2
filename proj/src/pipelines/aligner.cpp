#include "mmgl/pipelines/aligner.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "mmgl/error.hpp"
#include "mmgl/vlm/digest.hpp"
#include "parallel.hpp"

namespace mmgl {
namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += "; ";
    out += parts[i];
  }
  return out;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::ostringstream suffix;
  suffix << ".tmp" << std::this_thread::get_id();
  auto tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

Domain graph_domain(const MultimodalGraph& graph) {
  return parse_domain(graph.domain.empty() ? "movies" : graph.domain);
}

PromptBundle image_description_prompt(const MultimodalGraph& graph, NodeId v) {
  if (v >= graph.num_nodes()) throw Error(Errc::InvalidNode, "node " + std::to_string(v));
  const auto image = graph.image_file(v);
  if (!image) throw Error(Errc::NoImage, "node " + std::to_string(v) + " has no image");
  TemplateBindings b;
  b.image = *image;
  return render_bundle({graph_domain(graph), TemplateKind::image_description}, b);
}

std::string generate_image_description(VlmClient& client, const MultimodalGraph& graph, NodeId v) {
  return client.complete(image_description_prompt(graph, v));
}

std::vector<NodeId> aligner_neighbors(const MultimodalGraph& graph, NodeId v,
                                      const AlignerOptions& opts) {
  if (opts.select) {
    return top_k_similar_neighbors(graph, v, *opts.select,
                                   similarity_features(graph, opts.select->similarity));
  }
  auto ids = sample_neighbors(graph, v, opts.neighbor_count, opts.seed);
  std::sort(ids.begin(), ids.end());
  return ids;
}

PromptBundle summary_prompt(const MultimodalGraph& graph, NodeId v,
                            const DescriptionMap& descriptions, bool structural,
                            const AlignerOptions& opts) {
  if (v >= graph.num_nodes()) throw Error(Errc::InvalidNode, "node " + std::to_string(v));
  const auto own = descriptions.find(v);
  if (own == descriptions.end()) {
    throw Error(Errc::MissingDescription, "node " + std::to_string(v) + " has no image description");
  }
  TemplateBindings b;
  b.text_information = graph.nodes[v].text;
  b.image_summary = own->second;
  if (!structural) return render_bundle({graph_domain(graph), TemplateKind::aligner_summary}, b);

  std::vector<std::string> texts, summaries;
  for (NodeId u : aligner_neighbors(graph, v, opts)) {
    const auto it = descriptions.find(u);
    if (it == descriptions.end()) continue;
    texts.push_back(graph.nodes[u].text);
    summaries.push_back(it->second);
  }
  if (!texts.empty()) {
    b.neighbor_text = join(texts);
    b.neighbor_image_summary = join(summaries);
  }
  return render_bundle({graph_domain(graph), TemplateKind::aligner_summary_structural}, b);
}

std::string summarize_multimodal(VlmClient& client, const MultimodalGraph& graph, NodeId v,
                                 const DescriptionMap& descriptions, bool structural,
                                 const AlignerOptions& opts) {
  return client.complete(summary_prompt(graph, v, descriptions, structural, opts));
}

Tensor latent_align_features(const MultimodalGraph& graph, const ProjectionHeads* heads) {
  return fuse_features(graph, FusionSpec{FusionMode::concat}, heads).features;
}

ArtifactStore::ArtifactStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ArtifactStore::path_for(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<AlignerArtifacts> ArtifactStore::load(const std::string& key) const {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(ss.str());
    AlignerArtifacts a;
    a.node_id = j.at("node_id").get<NodeId>();
    auto field = [&](const char* name) -> std::optional<std::string> {
      if (!j.contains(name) || j[name].is_null()) return std::nullopt;
      return j[name].get<std::string>();
    };
    a.t_i = field("t_i");
    a.t_s = field("t_s");
    a.t_ss = field("t_ss");
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedFile, path.string() + ": " + e.what());
  }
}

void ArtifactStore::save(const std::string& key, const AlignerArtifacts& a) const {
  const auto path = path_for(key);
  if (std::filesystem::exists(path)) return;
  nlohmann::ordered_json j;
  j["node_id"] = a.node_id;
  j["t_i"] = a.t_i ? nlohmann::ordered_json(*a.t_i) : nlohmann::ordered_json(nullptr);
  j["t_s"] = a.t_s ? nlohmann::ordered_json(*a.t_s) : nlohmann::ordered_json(nullptr);
  if (a.t_ss) j["t_ss"] = *a.t_ss;
  write_atomically(path, j.dump(2) + "\n");
}

std::string artifact_key(const MultimodalGraph& graph, NodeId v, const AlignRunOptions& opts,
                         const ClientConfig& cfg) {
  nlohmann::ordered_json j;
  j["domain"] = domain_name(graph_domain(graph));
  j["node_id"] = v;
  j["text"] = graph.nodes.at(v).text;
  const auto image = graph.image_file(v);
  j["image_sha256"] = image ? nlohmann::ordered_json(sha256_hex(read_image_bytes(*image)))
                            : nlohmann::ordered_json(nullptr);
  j["model"] = cfg.model_name;
  j["temperature"] = cfg.temperature;
  j["max_tokens"] = cfg.max_tokens;
  j["structural"] = opts.structural;
  if (opts.structural) {
    nlohmann::ordered_json neighbors = nlohmann::ordered_json::array();
    for (NodeId u : aligner_neighbors(graph, v, opts.aligner)) {
      const auto img = graph.image_file(u);
      neighbors.push_back({{"id", u},
                           {"text", graph.nodes[u].text},
                           {"image_sha256", img ? nlohmann::ordered_json(sha256_hex(read_image_bytes(*img)))
                                                : nlohmann::ordered_json(nullptr)}});
    }
    j["neighbors"] = neighbors;
  }
  return sha256_hex(j.dump());
}

AlignerArtifactMap run_aligner(VlmClient& client, const MultimodalGraph& graph,
                               std::span<const NodeId> nodes, const AlignRunOptions& opts,
                               const ArtifactStore* store) {
  const std::size_t workers = client.config().concurrency_limit;
  AlignerArtifactMap result;
  std::vector<std::string> keys(nodes.size());
  std::vector<NodeId> pending;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    if (v >= graph.num_nodes()) throw Error(Errc::InvalidNode, "node " + std::to_string(v));
    if (store) {
      keys[i] = artifact_key(graph, v, opts, client.config());
      if (auto cached = store->load(keys[i])) {
        result[v] = *cached;
        continue;
      }
    }
    pending.push_back(v);
    origin.push_back(i);
  }
  if (pending.empty()) return result;

  std::set<NodeId> describe;
  for (NodeId v : pending) {
    if (graph.nodes[v].image_path) describe.insert(v);
    if (!opts.structural) continue;
    for (NodeId u : aligner_neighbors(graph, v, opts.aligner)) {
      if (graph.nodes[u].image_path) describe.insert(u);
    }
  }
  const std::vector<NodeId> to_describe(describe.begin(), describe.end());
  std::vector<std::string> texts(to_describe.size());
  std::vector<std::exception_ptr> errors(to_describe.size());
  detail::parallel_for(to_describe.size(), workers, [&](std::size_t i) {
    try {
      texts[i] = generate_image_description(client, graph, to_describe[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  DescriptionMap descriptions;
  for (std::size_t i = 0; i < to_describe.size(); ++i) descriptions[to_describe[i]] = texts[i];

  std::vector<AlignerArtifacts> produced(pending.size());
  std::vector<std::exception_ptr> summary_errors(pending.size());
  detail::parallel_for(pending.size(), workers, [&](std::size_t i) {
    const NodeId v = pending[i];
    AlignerArtifacts& a = produced[i];
    a.node_id = v;
    try {
      const auto it = descriptions.find(v);
      if (it == descriptions.end()) return;
      a.t_i = it->second;
      a.t_s = summarize_multimodal(client, graph, v, descriptions, false, opts.aligner);
      if (opts.structural) {
        a.t_ss = summarize_multimodal(client, graph, v, descriptions, true, opts.aligner);
      }
    } catch (...) {
      summary_errors[i] = std::current_exception();
    }
  });
  for (auto& e : summary_errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t p = 0; p < pending.size(); ++p) {
    if (store) store->save(keys[origin[p]], produced[p]);
    result[pending[p]] = produced[p];
  }
  return result;
}

}  // namespace mmgl
