#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mmgl/encoders/training.hpp"
#include "mmgl/error.hpp"
#include "mmgl/graph/io.hpp"
#include "mmgl/graph/split.hpp"
#include "mmgl/harness/ablation.hpp"
#include "mmgl/harness/config.hpp"
#include "mmgl/harness/experiment.hpp"
#include "mmgl/harness/metrics.hpp"
#include "mmgl/pipelines/sft.hpp"
#include "mmgl/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace mmgl;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kPipeline = 2;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string client;
  std::string cache_dir;
};

bool is_validation(Errc c) {
  return c == Errc::ConfigInvalid || c == Errc::InvalidArgument || c == Errc::BadRatios ||
         c == Errc::UnknownDomain;
}

ExperimentConfig load_config(const Globals& g) {
  if (g.config.empty()) throw Error(Errc::ConfigInvalid, "--config is required for this command");
  ExperimentConfig cfg = load_experiment_config(g.config);
  if (g.seed) cfg.seeds = {*g.seed};
  if (!g.out.empty()) cfg.output_dir = fs::absolute(g.out).string();
  if (!g.client.empty()) cfg.client.kind = g.client == "http" ? ClientKind::http : ClientKind::mock;
  if (!g.cache_dir.empty()) cfg.client.cache_dir = fs::absolute(g.cache_dir).string();
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Globals& g, const std::optional<ExperimentConfig>& cfg) {
  const fs::path p = !g.out.empty() ? fs::path(g.out) : cfg ? cfg->output_path() : fs::path("out");
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error(Errc::Io, "cannot write " + path.string());
  o << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json parse_json(const std::string& text, const fs::path& origin) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, origin.string() + ": " + e.what());
  }
}

LoadedGraph load_dataset(const ExperimentConfig& cfg) {
  auto loaded = load_graph(cfg.graph_files());
  loaded.graph.domain = cfg.dataset.domain;
  return loaded;
}

int run_paradigm(const Globals& g, Paradigm p, const std::function<void(ExperimentConfig&)>& tweak = {}) {
  ExperimentConfig cfg = load_config(g);
  cfg.paradigm = p;
  if (tweak) tweak(cfg);
  const auto report = run_experiment(cfg);
  ordered_json summary{{"name", report.name}, {"status", report.status}, {"output", cfg.output_path().string()}};
  if (report.status != "ok") {
    summary["error"] = report.error;
    std::cout << summary.dump() << "\n";
    return kPipeline;
  }
  summary["accuracy"] = report.accuracy.mean;
  summary["macro_f1"] = report.macro_f1.mean;
  if (report.unparseable_rate) summary["unparseable_rate"] = *report.unparseable_rate;
  std::cout << summary.dump() << "\n";
  return kOk;
}

int cmd_ingest(const Globals& g) {
  const auto cfg = load_config(g);
  const auto loaded = load_dataset(cfg);
  loaded.graph.validate();
  const fs::path out = out_dir(g, cfg);
  GraphFiles files{out / "nodes.jsonl", out / "edges.csv", out / "classes.txt", {}, cfg.dataset.domain};
  write_graph(loaded.graph, files);
  const auto& r = loaded.report;
  ordered_json j{{"nodes", r.nodes},
                 {"edges", r.edges},
                 {"classes", r.classes},
                 {"edge_lines", r.edge_lines},
                 {"self_loops_dropped", r.edge_stats.self_loops_dropped},
                 {"duplicates_dropped", r.edge_stats.duplicates_dropped},
                 {"nodes_with_image_row", r.nodes_with_image_row}};
  write_text(out / "ingest_report.json", j.dump(2) + "\n");
  std::cout << j.dump() << "\n";
  return kOk;
}

int cmd_split(const Globals& g) {
  const auto cfg = load_config(g);
  const auto loaded = load_dataset(cfg);
  const auto s = split_nodes(loaded.graph, cfg.split, g.seed.value_or(cfg.split_seed));
  ordered_json j{{"seed", s.seed},
                 {"ratios", {{"train", s.ratios.train}, {"val", s.ratios.val}, {"test", s.ratios.test}}},
                 {"train", s.train},
                 {"val", s.val},
                 {"test", s.test}};
  write_text(out_dir(g, cfg) / "split.json", j.dump() + "\n");
  std::cout << ordered_json{{"train", s.train.size()}, {"val", s.val.size()}, {"test", s.test.size()}}.dump()
            << "\n";
  return kOk;
}

int cmd_train_encoder(const Globals& g, const std::string& variant) {
  const auto cfg = load_config(g);
  const auto loaded = load_dataset(cfg);
  const auto split = split_nodes(loaded.graph, cfg.split, cfg.split_seed);
  ContrastiveConfig cc = cfg.encoder.contrastive;
  cc.seed = cfg.seeds.front();
  const std::span<const NodeId> train(split.train);
  const auto trained = variant == "pvlm_f" ? train_pvlm_f(loaded.graph, cc, train)
                                           : train_structure_aware_encoder(loaded.graph, cc, train);
  const fs::path dir = out_dir(g, cfg) / "heads";
  save_heads(dir, trained.heads, cc, variant);
  std::cout << ordered_json{{"variant", variant},
                            {"steps", trained.report.steps},
                            {"cosine_before", trained.report.cosine_before},
                            {"cosine_after", trained.report.cosine_after},
                            {"heads", dir.string()}}
                   .dump()
            << "\n";
  return kOk;
}

int cmd_export_sft(const Globals& g) {
  const auto cfg = load_config(g);
  const auto loaded = load_dataset(cfg);
  const auto split = split_nodes(loaded.graph, cfg.split, cfg.split_seed);
  SftExportOptions opts;
  opts.prompt.structure = cfg.predictor.structure;
  opts.prompt.select = cfg.predictor.select;
  const fs::path path = out_dir(g, cfg) / "sft_train.jsonl";
  const auto n = export_sft_dataset(loaded.graph, split, opts, path);
  std::cout << ordered_json{{"records", n}, {"path", path.string()}}.dump() << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& report_path) {
  const auto report = read_report(report_path);
  if (report.status != "ok") throw Error(Errc::InvalidArgument, report_path + " records a failed run");
  ordered_json runs = ordered_json::array();
  std::vector<double> accs;
  bool consistent = true;
  for (const auto& r : report.runs) {
    const double acc = accuracy(r.predicted, r.gold);
    const double f1 = macro_f1(r.predicted, r.gold, report.classes.size());
    consistent = consistent && acc == r.accuracy;
    accs.push_back(acc);
    runs.push_back({{"seed", r.seed}, {"accuracy", acc}, {"macro_f1", f1}});
  }
  const auto ms = mean_std(accs);
  ordered_json j{{"name", report.name}, {"runs", runs}, {"accuracy", ms.mean}};
  if (ms.std) j["accuracy_std"] = *ms.std;
  j["consistent"] = consistent && ms.mean == report.accuracy.mean;
  std::cout << j.dump() << "\n";
  return j["consistent"].get<bool>() ? kOk : kPipeline;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& out) {
  std::string md = "| experiment | status | accuracy | macro-F1 | unparseable |\n|---|---|---|---|---|\n";
  for (const auto& p : paths) {
    const auto r = read_report(p);
    std::ostringstream row;
    row.setf(std::ios::fixed);
    row.precision(4);
    row << "| " << r.name << " | " << r.status << " | ";
    if (r.status == "ok") {
      row << r.accuracy.mean;
      if (r.accuracy.std) row << " ± " << *r.accuracy.std;
      row << " | " << r.macro_f1.mean << " | ";
      if (r.unparseable_rate) row << *r.unparseable_rate;
      else row << "-";
    } else {
      row << "- | - | -";
    }
    row << " |\n";
    md += row.str();
  }
  if (!out.empty()) write_text(out, md);
  std::cout << md;
  return kOk;
}

int cmd_ablate(const Globals& g, const std::vector<std::string>& model_names) {
  const auto cfg = load_config(g);
  const auto loaded = load_dataset(cfg);
  std::vector<ModelKind> models;
  for (const auto& m : model_names) models.push_back(parse_model_kind(m));
  AblationOptions opts;
  opts.gnn = cfg.encoder.gnn;
  opts.ratios = cfg.split;
  opts.split_seed = cfg.split_seed;
  const auto table = modality_ablation(loaded.graph, models, cfg.seeds, opts);
  const fs::path out = out_dir(g, cfg);
  write_text(out / "ablation.json", table.to_json());
  write_text(out / "ablation.md", table.to_markdown());
  std::cout << table.to_markdown();
  return kOk;
}

/// Input: JSON array of {dataset, setting, structure_aware, accuracy}.
int cmd_structure_gain(const std::string& path) {
  const auto j = parse_json(read_text(path), path);
  std::vector<SettingResult> results;
  try {
    for (const auto& e : j) {
      results.push_back({e.at("dataset").get<std::string>(), e.at("setting").get<std::string>(),
                         e.at("structure_aware").get<bool>(), e.at("accuracy").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, path + ": " + e.what());
  }
  ordered_json out;
  for (const auto& [dataset, gain] : structure_gain_by_dataset(results)) out[dataset] = gain;
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_generate_fixture(const Globals& g, const std::string& kind, std::size_t nodes, std::size_t edges) {
  const std::uint64_t seed = g.seed.value_or(0);
  MultimodalGraph graph;
  if (kind == "two-cluster") {
    synthetic::TwoClusterOptions o;
    o.nodes = nodes;
    o.seed = seed;
    graph = synthetic::two_cluster_graph(o);
  } else if (kind == "xor") {
    synthetic::XorOptions o;
    o.nodes = nodes;
    o.seed = seed;
    graph = synthetic::xor_multimodal_graph(o);
  } else {
    synthetic::ShapedOptions o;
    o.nodes = nodes;
    o.edges = edges;
    o.seed = seed;
    graph = synthetic::shaped_graph(o);
  }
  const auto m = synthetic::write_dataset(graph, out_dir(g, std::nullopt));
  std::cout << ordered_json{{"nodes", m.nodes}, {"edges", m.edges}, {"classes", m.classes}, {"domain", m.domain}}.dump()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal graph learning benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Experiment configuration (YAML)");
  app.add_option("--seed", g.seed, "Single seed overriding the configured seeds");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--client", g.client, "VLM client kind")->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--cache-dir", g.cache_dir, "Response cache directory");

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and write it in normalized form");
  auto* split = app.add_subcommand("split", "Write the train/val/test split");
  auto* train_encoder = app.add_subcommand("train-encoder", "Train contrastive projection heads");
  std::string variant = "structure_aware";
  train_encoder->add_option("--variant", variant)->check(CLI::IsMember({"structure_aware", "pvlm_f"}));
  auto* train_gnn = app.add_subcommand("train-gnn", "Train and evaluate the configured GNN per seed");
  auto* align = app.add_subcommand("align", "Generate aligner text artifacts and train on latent features");
  auto* export_sft = app.add_subcommand("export-sft", "Write the SFT dataset for the train split");
  auto* predict = app.add_subcommand("predict", "Classify test nodes through the VLM client");
  auto* evaluate = app.add_subcommand("evaluate", "Recompute metrics from a report's stored predictions");
  std::string report_path;
  evaluate->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  auto* report = app.add_subcommand("report", "Summarize report files as a Markdown table");
  std::vector<std::string> report_paths;
  std::string report_out;
  report->add_option("reports", report_paths, "report.json files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", report_out, "Also write the table here");
  auto* ablate = app.add_subcommand("ablate-modality", "Text / image / text+image accuracy per model");
  std::vector<std::string> models{"mlp", "gcn", "sage", "mmgcn", "mgat"};
  ablate->add_option("--models", models, "Model kinds")->delimiter(',');
  auto* gain = app.add_subcommand("structure-gain", "Best structure-aware minus best structure-agnostic accuracy");
  std::string results_path;
  gain->add_option("results", results_path, "JSON array of setting results")->required()->check(CLI::ExistingFile);
  auto* fixture = app.add_subcommand("generate-fixture", "Write a synthetic dataset");
  std::string kind = "shaped";
  std::size_t nodes = 16672, edges = 218390;
  fixture->add_option("--kind", kind)->check(CLI::IsMember({"shaped", "two-cluster", "xor"}));
  fixture->add_option("--nodes", nodes);
  fixture->add_option("--edges", edges);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*ingest) return cmd_ingest(g);
    if (*split) return cmd_split(g);
    if (*train_encoder) return cmd_train_encoder(g, variant);
    if (*train_gnn) return run_paradigm(g, Paradigm::encoder);
    if (*align) return run_paradigm(g, Paradigm::aligner, [](ExperimentConfig& c) { c.aligner.generate_text = true; });
    if (*export_sft) return cmd_export_sft(g);
    if (*predict) return run_paradigm(g, Paradigm::predictor);
    if (*evaluate) return cmd_evaluate(report_path);
    if (*report) return cmd_report(report_paths, report_out);
    if (*ablate) return cmd_ablate(g, models);
    if (*gain) return cmd_structure_gain(results_path);
    if (*fixture) return cmd_generate_fixture(g, kind, nodes, edges);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_validation(e.code()) ? kValidation : kPipeline;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kPipeline;
  }
  return kValidation;
}
