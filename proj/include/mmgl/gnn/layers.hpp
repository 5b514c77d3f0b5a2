#pragma once

#include <vector>

#include "mmgl/graph/graph.hpp"
#include "mmgl/numerics/tensor.hpp"

namespace mmgl {

/// Sparse Â = D̃^{-1/2}(A+I)D̃^{-1/2}, D̃ the degree matrix of A+I.
/// Â is symmetric, so apply() is also its own backward.
class GcnPropagator {
 public:
  explicit GcnPropagator(const Adjacency& adjacency);
  Tensor apply(const Tensor& x) const;
  std::size_t num_nodes() const noexcept { return self_weight_.size(); }

 private:
  const Adjacency* adjacency_;
  std::vector<float> self_weight_;  // 1/d̃_v
  std::vector<float> edge_weight_;  // CSR-aligned 1/sqrt(d̃_u d̃_v)
};

/// Row-wise mean over hop-1 neighbors; isolated nodes aggregate to zero.
class MeanAggregator {
 public:
  explicit MeanAggregator(const Adjacency& adjacency) : adjacency_(&adjacency) {}
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& grad) const;

 private:
  const Adjacency* adjacency_;
};

/// H = ReLU(Â·X·W); `activate = false` for a final layer.
Tensor gcn_layer(const Tensor& x, const Adjacency& adjacency, const Tensor& weight, bool activate = true);

/// H_v = ReLU(X_v·W_self + mean_{u∈N(v)} X_u·W_neigh).
Tensor sage_layer(const Tensor& x, const Adjacency& adjacency, const Tensor& w_self, const Tensor& w_neigh,
                  bool activate = true);

/// Per-edge attention over hop-1 neighborhoods, aligned with the adjacency's
/// CSR order: e_vu = LeakyReLU(a_src·h_v + a_dst·h_u) (equivalently
/// a·[h_v ‖ h_u]), alpha = softmax of e over u ∈ N(v).
struct AttentionScores {
  std::vector<float> raw;    // pre-LeakyReLU score per directed edge
  std::vector<float> alpha;  // normalized weight per directed edge
};

inline constexpr float kLeakySlope = 0.2f;

AttentionScores attention_coefficients(const Tensor& h, const Adjacency& adjacency, const Tensor& a_src,
                                       const Tensor& a_dst, float slope = kLeakySlope);
/// out_v = Σ_u alpha_vu h_u (zero for isolated v).
Tensor attention_aggregate(const Tensor& h, const Adjacency& adjacency, const AttentionScores& scores);

}  // namespace mmgl
