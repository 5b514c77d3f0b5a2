#pragma once

#include <cstdint>

#include "mmgl/graph/graph.hpp"
#include "mmgl/graph/io.hpp"

namespace mmgl::synthetic {

/// Two-class stochastic block model whose text/image rows are class mean
/// plus Gaussian noise (linearly separable for small noise).
struct TwoClusterOptions {
  std::size_t nodes = 200;
  std::size_t dim = 8;
  double p_in = 0.05;
  double p_out = 0.005;
  double separation = 2.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};
MultimodalGraph two_cluster_graph(const TwoClusterOptions& opts);

/// Label = XOR(text bit, image bit). Each modality alone is independent of
/// the label; only the pair determines it. Edges are uniform random.
struct XorOptions {
  std::size_t nodes = 1000;
  std::size_t text_dim = 8;
  std::size_t image_dim = 8;
  double separation = 2.0;
  double noise = 0.5;
  double avg_degree = 4.0;
  std::uint64_t seed = 0;
};
MultimodalGraph xor_multimodal_graph(const XorOptions& opts);

/// Two dense blocks with sparse cross edges; embeddings share a per-block
/// mean direction (weight `signal`) on top of isotropic noise.
struct TwoBlockOptions {
  std::size_t nodes = 8000;
  std::size_t text_dim = 64;
  std::size_t image_dim = 64;
  double p_in = 0.0025;
  double p_out = 0.0001;
  double signal = 0.5;
  std::uint64_t seed = 0;
};
MultimodalGraph two_block_graph(const TwoBlockOptions& opts);

/// Random graph with exactly `edges` distinct undirected edges, `classes`
/// labels and both embedding tables; every node gets an image row and path.
struct ShapedOptions {
  std::size_t nodes = 16672;
  std::size_t edges = 218390;
  std::size_t classes = 19;
  std::size_t text_dim = 8;
  std::size_t image_dim = 8;
  std::string domain = "movies";
  std::uint64_t seed = 0;
};
MultimodalGraph shaped_graph(const ShapedOptions& opts);

struct DatasetManifest {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t classes = 0;
  std::string domain;
  GraphFiles files;
};

/// Writes nodes.jsonl, edges.csv, classes.txt, text.emb / image.emb, a small
/// placeholder file per image_path and manifest.json (the counts) into `dir`.
DatasetManifest write_dataset(const MultimodalGraph& graph, const std::filesystem::path& dir);

}  // namespace mmgl::synthetic
