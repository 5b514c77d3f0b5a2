#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "mmgl/numerics/tensor.hpp"

namespace mmgl {

/// A trainable tensor with its gradient slot and Adam moments.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor init);

  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;
  std::int64_t step = 0;

  void zero_grad();
  /// Adds `g` into the gradient slot (shapes must match).
  void accumulate(const Tensor& g);
};

struct OptimConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

/// Bias-corrected Adam update of every parameter, then zeroes the gradients.
/// Throws NonFiniteGradient (without touching any parameter) if a gradient
/// holds NaN/Inf.
void adam_step(std::span<Parameter* const> params, const OptimConfig& cfg);

}  // namespace mmgl
