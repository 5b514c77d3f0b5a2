#pragma once

#include "mmgl/numerics/tensor.hpp"

namespace mmgl {

/// Loss value plus gradients with respect to the two (unnormalized) inputs.
struct PairLoss {
  double loss = 0.0;
  Tensor grad_first;
  Tensor grad_second;
};

/// Symmetric InfoNCE over row-aligned batches (row i of each is the same
/// node). Rows are L2-normalized, S = t·vᵀ, and the loss averages the
/// row-wise and column-wise cross-entropy of S/tau with the diagonal as the
/// positive. Throws DegenerateBatch for fewer than 2 rows.
PairLoss clip_align_loss(const Tensor& text, const Tensor& image, double tau);

/// Structure-aware contrastive loss. Row i of `positives` is the positive for
/// anchor i; the denominator runs over all anchors in the batch (the anchor
/// itself included):
///   L = mean_i −log( exp(cos(a_i,p_i)/tau) / Σ_k exp(cos(a_i,a_k)/tau) ).
/// Throws DegenerateBatch for an empty batch.
PairLoss structure_contrastive_loss(const Tensor& anchors, const Tensor& positives, double tau);

}  // namespace mmgl
