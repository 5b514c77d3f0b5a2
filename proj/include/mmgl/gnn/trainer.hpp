#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "mmgl/gnn/models.hpp"
#include "mmgl/graph/split.hpp"

namespace mmgl {

/// Node features handed to a model: one matrix, or {text, image} for the
/// multimodal variants.
struct FeatureSet {
  std::vector<Tensor> inputs;

  std::vector<std::size_t> dims() const;
  std::vector<const Tensor*> pointers() const;
};

struct TrainingMetrics {
  std::vector<double> train_loss;
  std::vector<double> val_accuracy;
  std::size_t best_epoch = 0;  // 0 = initial parameters
  double train_accuracy = 0.0;
  double val_accuracy_best = 0.0;
  double test_accuracy = 0.0;
};

struct TrainedModel {
  GnnConfig config;
  std::unique_ptr<NodeClassifier> model;
  std::size_t num_classes = 0;
  std::vector<std::size_t> feature_dims;
  TrainingMetrics metrics;
};

/// Full-batch Adam on softmax cross-entropy over the train nodes; keeps the
/// parameters of the epoch with the best validation accuracy (earliest on ties).
TrainedModel train_node_classifier(const MultimodalGraph& graph, const FeatureSet& features,
                                   const SplitAssignment& split, const GnnConfig& cfg);

struct Prediction {
  std::vector<NodeId> nodes;
  std::vector<int> labels;
  Tensor scores;  // logits, one row per requested node
};

/// Inference without dropout; argmax ties go to the lower class index.
Prediction predict(const TrainedModel& model, const MultimodalGraph& graph, const FeatureSet& features,
                   std::span<const NodeId> nodes);

double accuracy_on(const TrainedModel& model, const MultimodalGraph& graph, const FeatureSet& features,
                   std::span<const NodeId> nodes);

/// Checkpoint layout: manifest.json plus one EMB1 file per parameter.
void save_model(const std::filesystem::path& dir, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& dir);

}  // namespace mmgl
