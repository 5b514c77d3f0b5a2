#include "mmgl/gnn/trainer.hpp"

#include <fstream>

#include "json.hpp"
#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/numerics/tensor_io.hpp"

namespace mmgl {
namespace {

double accuracy_of(const Tensor& logits, const std::vector<int>& labels, std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  const auto pred = argmax_rows(logits);
  std::size_t correct = 0;
  for (NodeId v : nodes) correct += pred[v] == labels[v] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

}  // namespace

std::vector<std::size_t> FeatureSet::dims() const {
  std::vector<std::size_t> out;
  for (const auto& t : inputs) out.push_back(t.cols());
  return out;
}

std::vector<const Tensor*> FeatureSet::pointers() const {
  std::vector<const Tensor*> out;
  for (const auto& t : inputs) out.push_back(&t);
  return out;
}

TrainedModel train_node_classifier(const MultimodalGraph& graph, const FeatureSet& features,
                                   const SplitAssignment& split, const GnnConfig& cfg) {
  cfg.validate();
  for (const Tensor& t : features.inputs) require_finite(t, "node features");
  const auto dims = features.dims();
  TrainedModel out{cfg, make_model(cfg, dims, graph.classes.size()), graph.classes.size(), dims, {}};
  if (split.train.empty()) throw Error(Errc::EmptyTrainSet, "split has no training nodes");

  const GraphOperators ops(graph.adjacency);
  const auto inputs = features.pointers();
  const std::vector<int> labels = graph.labels();
  NodeClassifier& model = *out.model;
  const OptimConfig adam{cfg.lr};
  Rng rng(derive_seed(cfg.seed, 0xd20));

  auto evaluate = [&] { return model.forward(ops, inputs, nullptr).logits; };
  Tensor logits = evaluate();
  double best_val = accuracy_of(logits, labels, split.val);
  std::vector<Tensor> best_params;
  for (const auto& p : model.parameters()) best_params.push_back(p.value);

  auto params = model.parameter_ptrs();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    ForwardPass pass = model.forward(ops, inputs, &rng);
    LossAndGrad loss = softmax_cross_entropy(pass.logits, labels, split.train);
    model.backward(ops, pass, loss.grad);
    adam_step(params, adam);
    out.metrics.train_loss.push_back(loss.loss);

    logits = evaluate();
    const double val = accuracy_of(logits, labels, split.val);
    out.metrics.val_accuracy.push_back(val);
    if (val > best_val || split.val.empty()) {
      best_val = val;
      out.metrics.best_epoch = epoch;
      for (std::size_t i = 0; i < params.size(); ++i) best_params[i] = params[i]->value;
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];

  logits = evaluate();
  out.metrics.val_accuracy_best = accuracy_of(logits, labels, split.val);
  out.metrics.train_accuracy = accuracy_of(logits, labels, split.train);
  out.metrics.test_accuracy = accuracy_of(logits, labels, split.test);
  return out;
}

Prediction predict(const TrainedModel& model, const MultimodalGraph& graph, const FeatureSet& features,
                   std::span<const NodeId> nodes) {
  if (features.dims() != model.feature_dims) {
    throw Error(Errc::ShapeMismatch, "prediction features do not match the dims the model was trained on");
  }
  const GraphOperators ops(graph.adjacency);
  const Tensor logits = model.model->forward(ops, features.pointers(), nullptr).logits;
  for (NodeId v : nodes)
    if (v >= graph.num_nodes()) throw Error(Errc::InvalidNode, "node " + std::to_string(v));
  Prediction p;
  p.nodes.assign(nodes.begin(), nodes.end());
  p.scores = gather_rows(logits, p.nodes);
  p.labels = argmax_rows(p.scores);
  return p;
}

double accuracy_on(const TrainedModel& model, const MultimodalGraph& graph, const FeatureSet& features,
                   std::span<const NodeId> nodes) {
  const Prediction p = predict(model, graph, features, nodes);
  if (nodes.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) correct += p.labels[i] == graph.nodes[nodes[i]].label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

void save_model(const std::filesystem::path& dir, const TrainedModel& model) {
  std::filesystem::create_directories(dir);
  nlohmann::json params = nlohmann::json::array();
  std::size_t i = 0;
  for (const Parameter& p : model.model->parameters()) {
    const std::string file = "param_" + std::to_string(i++) + ".emb";
    write_emb1(dir / file, p.value);
    params.push_back({{"name", p.name}, {"file", file}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  const GnnConfig& c = model.config;
  nlohmann::json manifest = {
      {"model", model_kind_name(c.model)},
      {"layers", c.layers},
      {"hidden", c.hidden},
      {"dropout", c.dropout},
      {"epochs", c.epochs},
      {"lr", c.lr},
      {"seed", c.seed},
      {"num_classes", model.num_classes},
      {"feature_dims", model.feature_dims},
      {"best_epoch", model.metrics.best_epoch},
      {"parameters", params},
  };
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

TrainedModel load_model(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(Errc::Io, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
    TrainedModel out;
    out.config.model = parse_model_kind(m.at("model").get<std::string>());
    out.config.layers = m.at("layers").get<std::size_t>();
    out.config.hidden = m.at("hidden").get<std::size_t>();
    out.config.dropout = m.at("dropout").get<double>();
    out.config.epochs = m.at("epochs").get<std::size_t>();
    out.config.lr = m.at("lr").get<double>();
    out.config.seed = m.at("seed").get<std::uint64_t>();
    out.num_classes = m.at("num_classes").get<std::size_t>();
    out.feature_dims = m.at("feature_dims").get<std::vector<std::size_t>>();
    out.metrics.best_epoch = m.value("best_epoch", std::size_t{0});
    out.model = make_model(out.config, out.feature_dims, out.num_classes);
    auto& params = out.model->parameters();
    const auto& entries = m.at("parameters");
    if (entries.size() != params.size())
      throw Error(Errc::MalformedFile, dir.string() + ": parameter count differs from architecture");
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor value = read_emb1(dir / entries[i].at("file").get<std::string>());
      if (!value.same_shape(params[i].value) || entries[i].at("name").get<std::string>() != params[i].name)
        throw Error(Errc::MalformedFile, dir.string() + ": parameter " + params[i].name + " does not match");
      params[i].value = std::move(value);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedFile, (dir / "manifest.json").string() + ": " + e.what());
  }
}

}  // namespace mmgl
