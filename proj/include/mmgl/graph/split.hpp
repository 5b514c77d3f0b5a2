#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mmgl/graph/graph.hpp"

namespace mmgl {

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

/// Disjoint train/val/test node sets, each sorted ascending.
struct SplitAssignment {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;
};

/// Unstratified uniform permutation split. |val| = round(val·n),
/// |test| = round(test·n), the remainder goes to train, so every part is
/// within one node of its ratio. Deterministic in (n, ratios, seed). Throws
/// BadRatios unless all ratios are positive and sum to 1 within 1e-9.
SplitAssignment split_nodes(std::size_t num_nodes, const SplitRatios& ratios, std::uint64_t seed);
SplitAssignment split_nodes(const MultimodalGraph& graph, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace mmgl
