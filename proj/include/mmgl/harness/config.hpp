#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmgl/encoders/training.hpp"
#include "mmgl/gnn/models.hpp"
#include "mmgl/graph/io.hpp"
#include "mmgl/graph/split.hpp"
#include "mmgl/pipelines/predictor.hpp"
#include "mmgl/vlm/client.hpp"

namespace mmgl {

enum class Paradigm { encoder, aligner, predictor };

std::string_view paradigm_name(Paradigm p) noexcept;
Paradigm parse_paradigm(std::string_view name);

/// Paths exactly as written; relative ones resolve against ExperimentConfig::base_dir.
struct DatasetConfig {
  std::string nodes;
  std::string edges;
  std::string classes;
  std::string text_embeddings;   // optional
  std::string image_embeddings;  // optional
  std::string domain = "movies";
};

/// Which projection heads feed the classifier.
enum class HeadsMode { none, structure_aware, pvlm_f };

std::string_view heads_mode_name(HeadsMode m) noexcept;
HeadsMode parse_heads_mode(std::string_view name);

struct EncoderSettings {
  GnnConfig gnn;
  FusionMode fusion = FusionMode::concat;
  HeadsMode heads = HeadsMode::none;
  ContrastiveConfig contrastive;
};

struct AlignerSettings {
  /// Also generate descriptions and summaries through the client.
  bool generate_text = false;
  bool structural = false;
  std::size_t neighbor_count = 5;
  /// Cap on test nodes sent to the client; 0 sends all.
  std::size_t max_nodes = 0;
};

struct PredictorSettings {
  StructureMode structure = StructureMode::none;
  StructureSelectSpec select;
  std::size_t icl_budget = 0;
  bool retry_with_instruction = false;
  bool export_sft = false;
  std::size_t max_nodes = 0;
};

enum class ClientKind { mock, http };

struct ClientSettings {
  ClientKind kind = ClientKind::mock;
  ClientConfig config;
  std::string cache_dir;  // empty: in-memory cache
  /// Mock only: the first round(gold_fraction·n) evaluated nodes get their
  /// gold label, the rest the next class; everything else gets `fallback`.
  double gold_fraction = 1.0;
  std::string fallback = "mock response";
};

struct ExperimentConfig {
  std::string name = "experiment";
  Paradigm paradigm = Paradigm::encoder;
  DatasetConfig dataset;
  SplitRatios split;
  std::uint64_t split_seed = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  EncoderSettings encoder;
  AlignerSettings aligner;
  PredictorSettings predictor;
  ClientSettings client;
  std::string output_dir = "out";
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
  GraphFiles graph_files() const;
  std::filesystem::path output_path() const { return resolve(output_dir); }

  /// Throws ConfigInvalid naming the offending setting or missing file.
  void validate() const;
  /// Every setting, in a fixed key order, as JSON text.
  std::string echo_json() const;
};

/// Parses the nested YAML configuration. Unknown keys are rejected. Throws ConfigInvalid.
ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace mmgl
