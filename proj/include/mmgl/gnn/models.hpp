#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mmgl/gnn/layers.hpp"
#include "mmgl/numerics/optim.hpp"
#include "mmgl/numerics/random.hpp"

namespace mmgl {

enum class ModelKind { mlp, gcn, sage, mmgcn, mgat };

/// Report label; the multimodal variants are simplified and tagged "-lite".
std::string_view model_kind_name(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);
/// mmgcn/mgat consume separate text and image inputs; the rest take one matrix.
bool is_multimodal(ModelKind kind) noexcept;

struct GnnConfig {
  ModelKind model = ModelKind::gcn;
  std::size_t layers = 2;
  std::size_t hidden = 64;
  double dropout = 0.5;
  std::size_t epochs = 200;
  double lr = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Precomputed sparse operators shared by every forward pass on one graph.
struct GraphOperators {
  explicit GraphOperators(const Adjacency& adjacency)
      : adjacency(&adjacency), gcn(adjacency), mean(adjacency) {}

  const Adjacency* adjacency;
  GcnPropagator gcn;
  MeanAggregator mean;
};

struct ForwardCache {
  virtual ~ForwardCache() = default;
};

struct ForwardPass {
  Tensor logits;
  std::unique_ptr<ForwardCache> cache;
};

/// A node classifier with a hand-written backward pass. forward() is const
/// and keeps every intermediate in the returned cache; backward() adds the
/// parameter gradients into each Parameter::grad.
class NodeClassifier {
 public:
  virtual ~NodeClassifier() = default;

  virtual ModelKind kind() const noexcept = 0;
  /// `rng` enables dropout (training); pass nullptr for inference.
  virtual ForwardPass forward(const GraphOperators& ops, std::span<const Tensor* const> inputs,
                              Rng* rng) const = 0;
  virtual void backward(const GraphOperators& ops, const ForwardPass& pass, const Tensor& grad_logits) = 0;
  virtual std::unique_ptr<NodeClassifier> clone() const = 0;

  std::vector<Parameter>& parameters() noexcept { return params_; }
  const std::vector<Parameter>& parameters() const noexcept { return params_; }
  std::vector<Parameter*> parameter_ptrs();
  const std::vector<std::size_t>& input_dims() const noexcept { return input_dims_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  Parameter& param(std::string_view name);

 protected:
  NodeClassifier(std::vector<std::size_t> input_dims, std::size_t num_classes, double dropout)
      : input_dims_(std::move(input_dims)), num_classes_(num_classes), dropout_(dropout) {}

  /// Validates count, rows and widths of the inputs.
  void check_inputs(const GraphOperators& ops, std::span<const Tensor* const> inputs) const;

  std::vector<Parameter> params_;
  std::vector<std::size_t> input_dims_;
  std::size_t num_classes_;
  double dropout_;
};

/// `input_dims` holds one width (single-input models) or {d_text, d_image}.
std::unique_ptr<NodeClassifier> make_model(const GnnConfig& cfg, std::span<const std::size_t> input_dims,
                                           std::size_t num_classes);

}  // namespace mmgl
