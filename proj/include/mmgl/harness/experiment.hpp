#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmgl/harness/config.hpp"
#include "mmgl/harness/metrics.hpp"
#include "mmgl/vlm/client.hpp"

namespace mmgl {

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<NodeId> nodes;
  std::vector<int> gold;
  std::vector<int> predicted;  // -1 when no answer could be parsed
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> unparseable_rate;
  std::vector<std::vector<std::size_t>> confusion;
};

struct ExperimentReport {
  std::string config_echo;  // JSON text from ExperimentConfig::echo_json
  std::string name;
  std::string status = "ok";  // or "error"
  std::string error;
  std::vector<std::string> classes;
  std::vector<RunResult> runs;
  MeanStd accuracy;
  MeanStd macro_f1;
  std::optional<double> unparseable_rate;
  /// Relative to the output directory.
  std::map<std::string, std::string> artifacts;
  /// Kept out of report.json; written to the timing sidecar.
  double wall_clock_seconds = 0.0;
  std::string started_at;

  std::string to_json() const;
  std::string to_markdown() const;
};

/// Writes report.json, report.md and the timing sidecar report.timing.json into `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);
ExperimentReport read_report(const std::filesystem::path& json_path);

/// Client for a configuration. `mock_rules` (cache key to response) seeds the mock.
std::shared_ptr<VlmClient> make_client(const ClientSettings& settings,
                                       std::map<std::string, std::string> mock_rules = {});

/// Validates, loads the dataset, runs the paradigm once per seed and writes
/// the report under cfg.output_path(). Pipeline failures are recorded in the
/// report (status "error"); ConfigInvalid is thrown.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Runs independent experiments on up to `parallel` threads; reports come
/// back in input order.
std::vector<ExperimentReport> run_batch(const std::vector<ExperimentConfig>& configs, unsigned parallel = 1);

}  // namespace mmgl
