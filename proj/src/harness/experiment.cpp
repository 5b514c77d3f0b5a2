#include "mmgl/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "../pipelines/parallel.hpp"
#include "mmgl/error.hpp"
#include "mmgl/graph/io.hpp"
#include "mmgl/harness/ablation.hpp"
#include "mmgl/pipelines/aligner.hpp"
#include "mmgl/pipelines/predictor.hpp"
#include "mmgl/pipelines/sft.hpp"
#include "mmgl/vlm/cache.hpp"
#include "mmgl/vlm/http_client.hpp"

namespace mmgl {
namespace {

using J = nlohmann::ordered_json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
  return buf;
}

RunResult score(std::uint64_t seed, std::vector<NodeId> nodes, std::vector<int> gold, std::vector<int> predicted,
                std::size_t num_classes) {
  RunResult r;
  r.seed = seed;
  r.nodes = std::move(nodes);
  r.gold = std::move(gold);
  r.predicted = std::move(predicted);
  r.accuracy = accuracy(r.predicted, r.gold);
  r.macro_f1 = macro_f1(r.predicted, r.gold, num_classes);
  r.confusion = confusion_matrix(r.predicted, r.gold, num_classes);
  return r;
}

std::vector<int> gold_labels(const MultimodalGraph& graph, std::span<const NodeId> nodes) {
  std::vector<int> out;
  for (NodeId v : nodes) out.push_back(graph.nodes[v].label);
  return out;
}

std::vector<NodeId> capped(const std::vector<NodeId>& nodes, std::size_t cap) {
  if (cap == 0 || cap >= nodes.size()) return nodes;
  return {nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(cap)};
}

std::string rel(const std::string& s) { return std::filesystem::path(s).generic_string(); }

ClientSettings resolved_client(const ExperimentConfig& cfg) {
  ClientSettings s = cfg.client;
  if (!s.cache_dir.empty()) s.cache_dir = cfg.resolve(s.cache_dir).string();
  return s;
}

/// Encoder and aligner paradigms: optional contrastive heads, then a node classifier per seed.
void run_classifier(const ExperimentConfig& cfg, const MultimodalGraph& graph, const SplitAssignment& split,
                    const std::filesystem::path& out, ExperimentReport& report) {
  const FusionMode fusion = cfg.paradigm == Paradigm::aligner ? FusionMode::concat : cfg.encoder.fusion;
  for (std::uint64_t seed : cfg.seeds) {
    const std::string tag = "seed_" + std::to_string(seed);
    std::optional<ProjectionHeads> heads;
    if (cfg.encoder.heads != HeadsMode::none) {
      ContrastiveConfig cc = cfg.encoder.contrastive;
      cc.seed = seed;
      const std::span<const NodeId> train(split.train);
      heads = cfg.encoder.heads == HeadsMode::structure_aware ? train_structure_aware_encoder(graph, cc, train).heads
                                                               : train_pvlm_f(graph, cc, train).heads;
      save_heads(out / "heads" / tag, *heads, cc, heads_mode_name(cfg.encoder.heads));
      report.artifacts["heads/" + tag] = rel("heads/" + tag);
    }
    const ProjectionHeads* hp = heads ? &*heads : nullptr;
    FeatureSet fs;
    if (cfg.paradigm == Paradigm::aligner && !is_multimodal(cfg.encoder.gnn.model)) {
      fs.inputs.push_back(latent_align_features(graph, hp));
    } else {
      fs = make_feature_set(graph, cfg.encoder.gnn.model, fusion, hp);
    }
    GnnConfig gc = cfg.encoder.gnn;
    gc.seed = seed;
    const auto trained = train_node_classifier(graph, fs, split, gc);
    const auto pred = predict(trained, graph, fs, split.test);
    save_model(out / "models" / tag, trained);
    report.artifacts["models/" + tag] = rel("models/" + tag);
    report.runs.push_back(score(seed, split.test, gold_labels(graph, split.test), pred.labels, graph.classes.size()));
  }
}

void run_text_alignment(const ExperimentConfig& cfg, const MultimodalGraph& graph, const SplitAssignment& split,
                        const std::filesystem::path& out, ExperimentReport& report) {
  const auto client = make_client(resolved_client(cfg));
  AlignRunOptions opts;
  opts.structural = cfg.aligner.structural;
  opts.aligner.neighbor_count = cfg.aligner.neighbor_count;
  opts.aligner.seed = cfg.split_seed;
  const ArtifactStore store(out / "aligner_artifacts");
  const auto nodes = capped(split.test, cfg.aligner.max_nodes);
  const auto artifacts = run_aligner(*client, graph, nodes, opts, &store);
  J index = J::array();
  for (NodeId v : nodes) {
    const auto& a = artifacts.at(v);
    index.push_back({{"node_id", v}, {"file", artifact_key(graph, v, opts, client->config()) + ".json"},
                     {"has_summary", a.t_s.has_value()}});
  }
  write_file(out / "aligner_artifacts" / "index.json", index.dump(2) + "\n");
  report.artifacts["aligner_artifacts"] = "aligner_artifacts";
}

void run_predictor(const ExperimentConfig& cfg, const MultimodalGraph& graph, const SplitAssignment& split,
                   const std::filesystem::path& out, ExperimentReport& report) {
  PredictOptions opts;
  opts.prompt.structure = cfg.predictor.structure;
  opts.prompt.select = cfg.predictor.select;
  opts.retry_with_instruction = cfg.predictor.retry_with_instruction;
  opts.icl_exemplars = select_icl_exemplars(graph, split.train, cfg.predictor.icl_budget);
  const auto nodes = capped(split.test, cfg.predictor.max_nodes);

  std::map<std::string, std::string> rules;
  if (cfg.client.kind == ClientKind::mock) {
    const PredictionPromptBuilder builder(graph, graph.classes, opts.prompt);
    const auto gold_count = static_cast<std::size_t>(std::llround(cfg.client.gold_fraction * nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const NodeId v = nodes[i];
      const int label = graph.nodes[v].label;
      const int answer = i < gold_count ? label : (label + 1) % static_cast<int>(graph.classes.size());
      try {
        rules[cache_key(cfg.client.config, compose_prediction_bundle(builder, v, opts.icl_exemplars))] =
            graph.classes[answer];
      } catch (const Error&) {
        // The same failure is recorded per node by predict_nodes.
      }
    }
  }
  const auto client = make_client(resolved_client(cfg), std::move(rules));
  const auto run = predict_nodes(*client, graph, nodes, graph.classes, opts);

  std::vector<int> predicted;
  std::string lines;
  for (const auto& p : run.predictions) {
    predicted.push_back(p.predicted);
    J line{{"node_id", p.node}, {"gold", p.gold}, {"predicted", p.predicted},
           {"status", prediction_status_name(p.status)}, {"response", p.response}};
    if (!p.error.empty()) line["error"] = p.error;
    lines += line.dump() + "\n";
  }
  write_file(out / "predictions.jsonl", lines);
  report.artifacts["predictions"] = "predictions.jsonl";

  auto result = score(cfg.seeds.front(), nodes, gold_labels(graph, nodes), predicted, graph.classes.size());
  result.unparseable_rate = static_cast<double>(run.unparseable) / static_cast<double>(nodes.size());
  report.runs.push_back(std::move(result));

  if (cfg.predictor.export_sft) {
    SftExportOptions sft;
    sft.prompt = opts.prompt;
    export_sft_dataset(graph, split, sft, out / "sft_train.jsonl");
    report.artifacts["sft_train"] = "sft_train.jsonl";
  }
}

J run_json(const RunResult& r) {
  J j;
  j["seed"] = r.seed;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  if (r.unparseable_rate) j["unparseable_rate"] = *r.unparseable_rate;
  j["confusion"] = r.confusion;
  J preds = J::array();
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    preds.push_back({{"node_id", r.nodes[i]}, {"gold", r.gold[i]}, {"predicted", r.predicted[i]}});
  }
  j["predictions"] = preds;
  return j;
}

}  // namespace

std::string ExperimentReport::to_json() const {
  J j;
  j["name"] = name;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["config"] = config_echo.empty() ? J::object() : J::parse(config_echo);
  j["classes"] = classes;
  J metrics;
  if (!runs.empty()) {
    metrics["accuracy"] = accuracy.mean;
    if (accuracy.std) metrics["accuracy_std"] = *accuracy.std;
    metrics["macro_f1"] = macro_f1.mean;
    if (unparseable_rate) metrics["unparseable_rate"] = *unparseable_rate;
  }
  j["metrics"] = metrics.is_null() ? J::object() : metrics;
  J rs = J::array();
  for (const auto& r : runs) rs.push_back(run_json(r));
  j["runs"] = rs;
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_markdown() const {
  std::ostringstream md;
  md << "# " << name << "\n\nstatus: " << status << "\n";
  if (!error.empty()) md << "\nerror: " << error << "\n";
  if (runs.empty()) return md.str();
  md << "\n| metric | value |\n|---|---|\n";
  md << "| accuracy (%) | " << percent(accuracy.mean);
  if (accuracy.std) md << " ± " << percent(*accuracy.std);
  md << " |\n| macro-F1 (%) | " << percent(macro_f1.mean) << " |\n";
  if (unparseable_rate) md << "| unparseable (%) | " << percent(*unparseable_rate) << " |\n";
  md << "\n| seed | accuracy (%) | macro-F1 (%) |\n|---|---|---|\n";
  for (const auto& r : runs) md << "| " << r.seed << " | " << percent(r.accuracy) << " | " << percent(r.macro_f1) << " |\n";
  md << "\nConfusion, seed " << runs.front().seed << " (rows gold, columns predicted):\n\n| |";
  for (const auto& c : classes) md << " " << c << " |";
  md << " none |\n|---|";
  for (std::size_t i = 0; i <= classes.size(); ++i) md << "---|";
  md << "\n";
  for (std::size_t g = 0; g < runs.front().confusion.size(); ++g) {
    md << "| " << (g < classes.size() ? classes[g] : std::to_string(g)) << " |";
    for (std::size_t c : runs.front().confusion[g]) md << " " << c << " |";
    md << "\n";
  }
  return md.str();
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.to_json());
  write_file(dir / "report.md", report.to_markdown());
  J timing{{"started_at", report.started_at}, {"wall_clock_seconds", report.wall_clock_seconds}};
  write_file(dir / "report.timing.json", timing.dump(2) + "\n");
}

ExperimentReport read_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + json_path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = J::parse(ss.str());
    ExperimentReport r;
    r.name = j.at("name");
    r.status = j.at("status");
    r.error = j.value("error", std::string());
    r.config_echo = j.at("config").dump(2);
    r.classes = j.at("classes").get<std::vector<std::string>>();
    const auto& m = j.at("metrics");
    if (m.contains("accuracy")) {
      r.accuracy.mean = m.at("accuracy");
      if (m.contains("accuracy_std")) r.accuracy.std = m.at("accuracy_std").get<double>();
      r.macro_f1.mean = m.at("macro_f1");
      if (m.contains("unparseable_rate")) r.unparseable_rate = m.at("unparseable_rate").get<double>();
    }
    for (const auto& jr : j.at("runs")) {
      RunResult run;
      run.seed = jr.at("seed");
      run.accuracy = jr.at("accuracy");
      run.macro_f1 = jr.at("macro_f1");
      if (jr.contains("unparseable_rate")) run.unparseable_rate = jr.at("unparseable_rate").get<double>();
      run.confusion = jr.at("confusion").get<std::vector<std::vector<std::size_t>>>();
      for (const auto& p : jr.at("predictions")) {
        run.nodes.push_back(p.at("node_id"));
        run.gold.push_back(p.at("gold"));
        run.predicted.push_back(p.at("predicted"));
      }
      r.runs.push_back(std::move(run));
    }
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedFile, json_path.string() + ": " + e.what());
  }
}

std::shared_ptr<VlmClient> make_client(const ClientSettings& settings, std::map<std::string, std::string> mock_rules) {
  std::shared_ptr<VlmClient> inner;
  if (settings.kind == ClientKind::mock) {
    inner = std::make_shared<MockClient>(std::move(mock_rules), settings.fallback, settings.config);
  } else {
    inner = std::make_shared<HttpClient>(settings.config);
  }
  auto cache = settings.cache_dir.empty() ? std::make_shared<ResponseCache>()
                                          : std::make_shared<ResponseCache>(settings.cache_dir);
  return std::make_shared<CachedClient>(inner, cache);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.started_at = utc_now();
  report.name = cfg.name;
  report.config_echo = cfg.echo_json();
  const auto out = cfg.output_path();
  std::filesystem::create_directories(out);
  try {
    auto loaded = load_graph(cfg.graph_files());
    const MultimodalGraph& graph = loaded.graph;
    report.classes = graph.classes;
    const auto split = split_nodes(graph, cfg.split, cfg.split_seed);
    if (split.test.empty()) throw Error(Errc::Empty, "the test split is empty");
    switch (cfg.paradigm) {
      case Paradigm::encoder: run_classifier(cfg, graph, split, out, report); break;
      case Paradigm::aligner:
        if (cfg.aligner.generate_text) run_text_alignment(cfg, graph, split, out, report);
        run_classifier(cfg, graph, split, out, report);
        break;
      case Paradigm::predictor: run_predictor(cfg, graph, split, out, report); break;
    }
    std::vector<double> accs, f1s;
    for (const auto& r : report.runs) {
      accs.push_back(r.accuracy);
      f1s.push_back(r.macro_f1);
    }
    report.accuracy = mean_std(accs);
    report.macro_f1 = mean_std(f1s);
    if (cfg.paradigm == Paradigm::predictor) report.unparseable_rate = report.runs.front().unparseable_rate;
  } catch (const std::exception& e) {
    report.status = "error";
    report.error = e.what();
    report.runs.clear();
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_report(report, out);
  return report;
}

std::vector<ExperimentReport> run_batch(const std::vector<ExperimentConfig>& configs, unsigned parallel) {
  std::vector<ExperimentReport> reports(configs.size());
  detail::parallel_for(configs.size(), parallel, [&](std::size_t i) {
    try {
      reports[i] = run_experiment(configs[i]);
    } catch (const std::exception& e) {
      reports[i].name = configs[i].name;
      reports[i].status = "error";
      reports[i].error = e.what();
    }
  });
  return reports;
}

}  // namespace mmgl
