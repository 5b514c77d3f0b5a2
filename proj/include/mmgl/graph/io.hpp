#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mmgl/graph/graph.hpp"

namespace mmgl {

struct GraphFiles {
  std::filesystem::path nodes;    // JSON lines
  std::filesystem::path edges;    // "src,dst" per line
  std::filesystem::path classes;  // one class name per line
  std::map<Modality, std::filesystem::path> embeddings;  // EMB1 files
  std::string domain;
};

struct LoadReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;  // undirected, after cleanup
  std::size_t classes = 0;
  std::size_t edge_lines = 0;
  EdgeStats edge_stats;
  std::size_t nodes_with_image_row = 0;
};

struct LoadedGraph {
  MultimodalGraph graph;
  LoadReport report;
};

/// Reads the on-disk dataset. Errors: MalformedRecord (with file:line),
/// MissingEmbedding, UnknownLabel, Io.
LoadedGraph load_graph(const GraphFiles& files);

/// Writes the normalized dataset (nodes sorted by id, each undirected edge once
/// as "u,v" with u < v). Embedding tables are written next to the node file as
/// `<stem>.<modality>.emb` unless paths are given in `files.embeddings`.
void write_graph(const MultimodalGraph& graph, const GraphFiles& files);

}  // namespace mmgl
