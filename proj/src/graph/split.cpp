#include "mmgl/graph/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmgl/error.hpp"
#include "mmgl/numerics/random.hpp"

namespace mmgl {

SplitAssignment split_nodes(std::size_t num_nodes, const SplitRatios& ratios, std::uint64_t seed) {
  const double sum = ratios.train + ratios.val + ratios.test;
  if (!(ratios.train > 0.0 && ratios.val > 0.0 && ratios.test > 0.0) || std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::BadRatios, "ratios (" + std::to_string(ratios.train) + "," +
                                     std::to_string(ratios.val) + "," + std::to_string(ratios.test) +
                                     ") must be positive and sum to 1");
  }
  std::vector<NodeId> order(num_nodes);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(seed);
  rng.shuffle(order);

  const auto n = static_cast<double>(num_nodes);
  const auto n_val = static_cast<std::size_t>(std::llround(ratios.val * n));
  const auto n_test = static_cast<std::size_t>(std::llround(ratios.test * n));
  const std::size_t n_train = num_nodes - n_val - n_test;

  SplitAssignment s;
  s.seed = seed;
  s.ratios = ratios;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

SplitAssignment split_nodes(const MultimodalGraph& graph, const SplitRatios& ratios, std::uint64_t seed) {
  return split_nodes(graph.num_nodes(), ratios, seed);
}

}  // namespace mmgl
