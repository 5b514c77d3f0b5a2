#include "mmgl/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

std::string_view similarity_name(SimilaritySource s) {
  switch (s) {
    case SimilaritySource::text: return "text";
    case SimilaritySource::image: return "image";
    case SimilaritySource::fused: return "fused";
  }
  return "?";
}

SimilaritySource parse_similarity(std::string_view name) {
  for (auto s : {SimilaritySource::text, SimilaritySource::image, SimilaritySource::fused})
    if (similarity_name(s) == name) return s;
  throw Error(Errc::InvalidArgument, "unknown similarity source '" + std::string(name) + "'");
}

/// Walks one YAML mapping, rejecting keys nobody asked for.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw Error(Errc::ConfigInvalid, "'" + label() + "' must be a mapping");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull() || !node_[key]) return;
    try {
      out = node_[key].template as<T>();
    } catch (const YAML::Exception&) {
      throw Error(Errc::ConfigInvalid, "'" + full(key) + "' has the wrong type");
    }
  }

  /// Reads a string and converts it with `parse`, reporting failures under the key.
  template <typename T>
  void read_enum(const std::string& key, T& out, const std::function<T(std::string_view)>& parse) {
    std::string text;
    read(key, text);
    if (text.empty()) return;
    try {
      out = parse(text);
    } catch (const Error& e) {
      throw Error(Errc::ConfigInvalid, "'" + full(key) + "': " + e.what());
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section((node_ && node_.IsMap()) ? node_[key] : YAML::Node(), full(key));
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.contains(key)) throw Error(Errc::ConfigInvalid, "unknown setting '" + full(key) + "'");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(Errc::ConfigInvalid, message);
}

void require_file(const ExperimentConfig& cfg, const std::string& key, const std::string& value, bool optional) {
  if (value.empty()) {
    require(optional, "'" + key + "' is required");
    return;
  }
  const auto path = cfg.resolve(value);
  require(std::filesystem::is_regular_file(path), "'" + key + "' refers to a missing file: " + path.string());
}

}  // namespace

std::string_view paradigm_name(Paradigm p) noexcept {
  switch (p) {
    case Paradigm::encoder: return "encoder";
    case Paradigm::aligner: return "aligner";
    case Paradigm::predictor: return "predictor";
  }
  return "?";
}

Paradigm parse_paradigm(std::string_view name) {
  for (auto p : {Paradigm::encoder, Paradigm::aligner, Paradigm::predictor})
    if (paradigm_name(p) == name) return p;
  throw Error(Errc::InvalidArgument, "unknown paradigm '" + std::string(name) + "'");
}

std::string_view heads_mode_name(HeadsMode m) noexcept {
  switch (m) {
    case HeadsMode::none: return "none";
    case HeadsMode::structure_aware: return "structure_aware";
    case HeadsMode::pvlm_f: return "pvlm_f";
  }
  return "?";
}

HeadsMode parse_heads_mode(std::string_view name) {
  for (auto m : {HeadsMode::none, HeadsMode::structure_aware, HeadsMode::pvlm_f})
    if (heads_mode_name(m) == name) return m;
  throw Error(Errc::InvalidArgument, "unknown heads mode '" + std::string(name) + "'");
}

std::filesystem::path ExperimentConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

GraphFiles ExperimentConfig::graph_files() const {
  GraphFiles f;
  f.nodes = resolve(dataset.nodes);
  f.edges = resolve(dataset.edges);
  f.classes = resolve(dataset.classes);
  if (!dataset.text_embeddings.empty()) f.embeddings[Modality::text] = resolve(dataset.text_embeddings);
  if (!dataset.image_embeddings.empty()) f.embeddings[Modality::image] = resolve(dataset.image_embeddings);
  f.domain = dataset.domain;
  return f;
}

void ExperimentConfig::validate() const {
  require(!name.empty(), "'name' must not be empty");
  require_file(*this, "dataset.nodes", dataset.nodes, false);
  require_file(*this, "dataset.edges", dataset.edges, false);
  require_file(*this, "dataset.classes", dataset.classes, false);
  require_file(*this, "dataset.text_embeddings", dataset.text_embeddings, true);
  require_file(*this, "dataset.image_embeddings", dataset.image_embeddings, true);
  try {
    parse_domain(dataset.domain);
    split_nodes(10, split, 0);
    encoder.gnn.validate();
    if (encoder.heads != HeadsMode::none) encoder.contrastive.validate();
    predictor.select.validate();
    client.config.validate();
  } catch (const Error& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  require(!seeds.empty(), "'seeds' must list at least one seed");
  require(!output_dir.empty(), "'output_dir' must not be empty");
  require(client.gold_fraction >= 0.0 && client.gold_fraction <= 1.0, "'client.gold_fraction' must lie in [0, 1]");
  if (paradigm == Paradigm::encoder || paradigm == Paradigm::aligner) {
    require(!dataset.text_embeddings.empty() || !dataset.image_embeddings.empty(),
            "the " + std::string(paradigm_name(paradigm)) + " paradigm needs embedding files");
  }
  if (paradigm == Paradigm::aligner) {
    require(!dataset.text_embeddings.empty() && !dataset.image_embeddings.empty(),
            "the aligner paradigm needs both text and image embeddings");
  }
}

std::string ExperimentConfig::echo_json() const {
  using J = nlohmann::ordered_json;
  J j;
  j["name"] = name;
  j["paradigm"] = paradigm_name(paradigm);
  j["output_dir"] = output_dir;
  j["seeds"] = seeds;
  j["dataset"] = J{{"nodes", dataset.nodes},
                   {"edges", dataset.edges},
                   {"classes", dataset.classes},
                   {"text_embeddings", dataset.text_embeddings},
                   {"image_embeddings", dataset.image_embeddings},
                   {"domain", dataset.domain}};
  j["split"] = J{{"train", split.train}, {"val", split.val}, {"test", split.test}, {"seed", split_seed}};
  const auto& g = encoder.gnn;
  const auto& c = encoder.contrastive;
  j["encoder"] = J{{"model", model_kind_name(g.model)},
                   {"layers", g.layers},
                   {"hidden", g.hidden},
                   {"dropout", g.dropout},
                   {"epochs", g.epochs},
                   {"lr", g.lr},
                   {"fusion", fusion_mode_name(encoder.fusion)},
                   {"heads", heads_mode_name(encoder.heads)},
                   {"contrastive", J{{"tau", c.tau},
                                     {"neighbors", c.neighbors},
                                     {"batch_size", c.batch_size},
                                     {"lr", c.lr},
                                     {"epochs", c.epochs}}}};
  j["aligner"] = J{{"generate_text", aligner.generate_text},
                   {"structural", aligner.structural},
                   {"neighbor_count", aligner.neighbor_count},
                   {"max_nodes", aligner.max_nodes}};
  j["predictor"] = J{{"structure", structure_mode_name(predictor.structure)},
                     {"k", predictor.select.k},
                     {"hops", predictor.select.hops},
                     {"similarity", similarity_name(predictor.select.similarity)},
                     {"icl_budget", predictor.icl_budget},
                     {"retry_with_instruction", predictor.retry_with_instruction},
                     {"export_sft", predictor.export_sft},
                     {"max_nodes", predictor.max_nodes}};
  const auto& cc = client.config;
  j["client"] = J{{"kind", client.kind == ClientKind::mock ? "mock" : "http"},
                  {"endpoint", cc.endpoint},
                  {"model", cc.model_name},
                  {"timeout_ms", cc.timeout.count()},
                  {"max_retries", cc.max_retries},
                  {"backoff_ms", cc.backoff_base.count()},
                  {"temperature", cc.temperature},
                  {"max_tokens", cc.max_tokens},
                  {"concurrency", cc.concurrency_limit},
                  {"cache_dir", client.cache_dir},
                  {"gold_fraction", client.gold_fraction},
                  {"fallback", client.fallback}};
  return j.dump(2);
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("unreadable configuration: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  Section top(root, "");
  top.read("name", cfg.name);
  top.read_enum<Paradigm>("paradigm", cfg.paradigm, parse_paradigm);
  top.read("output_dir", cfg.output_dir);
  top.read("seeds", cfg.seeds);

  auto ds = top.child("dataset");
  ds.read("nodes", cfg.dataset.nodes);
  ds.read("edges", cfg.dataset.edges);
  ds.read("classes", cfg.dataset.classes);
  ds.read("text_embeddings", cfg.dataset.text_embeddings);
  ds.read("image_embeddings", cfg.dataset.image_embeddings);
  ds.read("domain", cfg.dataset.domain);
  ds.finish();

  auto sp = top.child("split");
  sp.read("train", cfg.split.train);
  sp.read("val", cfg.split.val);
  sp.read("test", cfg.split.test);
  sp.read("seed", cfg.split_seed);
  sp.finish();

  auto en = top.child("encoder");
  en.read_enum<ModelKind>("model", cfg.encoder.gnn.model, parse_model_kind);
  en.read("layers", cfg.encoder.gnn.layers);
  en.read("hidden", cfg.encoder.gnn.hidden);
  en.read("dropout", cfg.encoder.gnn.dropout);
  en.read("epochs", cfg.encoder.gnn.epochs);
  en.read("lr", cfg.encoder.gnn.lr);
  en.read_enum<FusionMode>("fusion", cfg.encoder.fusion, parse_fusion_mode);
  en.read_enum<HeadsMode>("heads", cfg.encoder.heads, parse_heads_mode);
  auto co = en.child("contrastive");
  co.read("tau", cfg.encoder.contrastive.tau);
  co.read("neighbors", cfg.encoder.contrastive.neighbors);
  co.read("batch_size", cfg.encoder.contrastive.batch_size);
  co.read("lr", cfg.encoder.contrastive.lr);
  co.read("epochs", cfg.encoder.contrastive.epochs);
  co.finish();
  en.finish();

  auto al = top.child("aligner");
  al.read("generate_text", cfg.aligner.generate_text);
  al.read("structural", cfg.aligner.structural);
  al.read("neighbor_count", cfg.aligner.neighbor_count);
  al.read("max_nodes", cfg.aligner.max_nodes);
  al.finish();

  auto pr = top.child("predictor");
  pr.read_enum<StructureMode>("structure", cfg.predictor.structure, parse_structure_mode);
  pr.read("k", cfg.predictor.select.k);
  pr.read("hops", cfg.predictor.select.hops);
  pr.read_enum<SimilaritySource>("similarity", cfg.predictor.select.similarity, parse_similarity);
  pr.read("icl_budget", cfg.predictor.icl_budget);
  pr.read("retry_with_instruction", cfg.predictor.retry_with_instruction);
  pr.read("export_sft", cfg.predictor.export_sft);
  pr.read("max_nodes", cfg.predictor.max_nodes);
  pr.finish();

  auto cl = top.child("client");
  auto& cc = cfg.client.config;
  cl.read_enum<ClientKind>("kind", cfg.client.kind, [](std::string_view k) {
    if (k == "mock") return ClientKind::mock;
    if (k == "http") return ClientKind::http;
    throw Error(Errc::InvalidArgument, "unknown client kind '" + std::string(k) + "'");
  });
  cl.read("endpoint", cc.endpoint);
  cl.read("model", cc.model_name);
  long long timeout = cc.timeout.count(), backoff = cc.backoff_base.count();
  cl.read("timeout_ms", timeout);
  cl.read("backoff_ms", backoff);
  require(timeout > 0 && backoff >= 0, "'client.timeout_ms' must be positive and 'client.backoff_ms' non-negative");
  cc.timeout = std::chrono::milliseconds(timeout);
  cc.backoff_base = std::chrono::milliseconds(backoff);
  cl.read("max_retries", cc.max_retries);
  cl.read("temperature", cc.temperature);
  cl.read("max_tokens", cc.max_tokens);
  cl.read("concurrency", cc.concurrency_limit);
  cl.read("cache_dir", cfg.client.cache_dir);
  cl.read("gold_fraction", cfg.client.gold_fraction);
  cl.read("fallback", cfg.client.fallback);
  cl.finish();

  top.finish();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigInvalid, "cannot read configuration " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), path.parent_path());
}

}  // namespace mmgl
