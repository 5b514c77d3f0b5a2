#include "mmgl/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "mmgl/error.hpp"
#include "mmgl/numerics/random.hpp"

namespace mmgl::synthetic {
namespace {

Tensor gaussian_rows(std::size_t rows, std::size_t dim, double sigma, Rng& rng) {
  Tensor t(rows, dim);
  for (auto& v : t.values()) v = static_cast<float>(sigma * rng.normal());
  return t;
}

std::vector<float> unit_direction(std::size_t dim, Rng& rng) {
  std::vector<float> d(dim);
  double norm = 0.0;
  for (auto& v : d) {
    v = static_cast<float>(rng.normal());
    norm += static_cast<double>(v) * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : d) v = static_cast<float>(v / norm);
  return d;
}

/// Bernoulli edges by block membership: p_same within equal `group`, p_diff otherwise.
std::vector<std::pair<NodeId, NodeId>> block_edges(const std::vector<int>& group, double p_same, double p_diff,
                                                   Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  const std::size_t n = group.size();
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.uniform01() < (group[u] == group[v] ? p_same : p_diff)) edges.emplace_back(u, v);
  return edges;
}

MultimodalGraph assemble(std::vector<int> labels, std::size_t classes, Tensor text, Tensor image,
                         const std::vector<std::pair<NodeId, NodeId>>& edges, const std::string& domain) {
  MultimodalGraph g;
  g.domain = domain;
  for (std::size_t c = 0; c < classes; ++c) g.classes.push_back("class_" + std::to_string(c));
  const std::size_t n = labels.size();
  for (NodeId v = 0; v < n; ++v) {
    NodeRecord r;
    r.id = v;
    r.text = "item " + std::to_string(v);
    r.label = labels[v];
    r.image_row = v;
    r.image_path = "images/" + std::to_string(v) + ".jpg";
    g.nodes.push_back(std::move(r));
  }
  g.adjacency = Adjacency::from_edges(n, edges);
  g.tables.emplace(Modality::text, EmbeddingTable{Modality::text, std::move(text)});
  g.tables.emplace(Modality::image, EmbeddingTable{Modality::image, std::move(image)});
  g.validate();
  return g;
}

}  // namespace

MultimodalGraph two_cluster_graph(const TwoClusterOptions& o) {
  Rng rng(o.seed);
  std::vector<int> labels(o.nodes);
  for (std::size_t v = 0; v < o.nodes; ++v) labels[v] = static_cast<int>(v % 2);
  rng.shuffle(labels);
  const auto dir_t = unit_direction(o.dim, rng);
  const auto dir_i = unit_direction(o.dim, rng);
  Tensor text = gaussian_rows(o.nodes, o.dim, o.noise, rng);
  Tensor image = gaussian_rows(o.nodes, o.dim, o.noise, rng);
  for (std::size_t v = 0; v < o.nodes; ++v) {
    const double sign = labels[v] == 0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < o.dim; ++c) {
      text(v, c) += static_cast<float>(sign * o.separation * dir_t[c]);
      image(v, c) += static_cast<float>(sign * o.separation * dir_i[c]);
    }
  }
  const auto edges = block_edges(labels, o.p_in, o.p_out, rng);
  return assemble(std::move(labels), 2, std::move(text), std::move(image), edges, "movies");
}

MultimodalGraph xor_multimodal_graph(const XorOptions& o) {
  Rng rng(o.seed);
  const auto dir_t = unit_direction(o.text_dim, rng);
  const auto dir_i = unit_direction(o.image_dim, rng);
  Tensor text = gaussian_rows(o.nodes, o.text_dim, o.noise, rng);
  Tensor image = gaussian_rows(o.nodes, o.image_dim, o.noise, rng);
  std::vector<int> labels(o.nodes);
  for (std::size_t v = 0; v < o.nodes; ++v) {
    // Balanced over the four (text bit, image bit) cells.
    const int cell = static_cast<int>(v % 4);
    const int bt = cell & 1, bi = (cell >> 1) & 1;
    labels[v] = bt ^ bi;
    for (std::size_t c = 0; c < o.text_dim; ++c) text(v, c) += static_cast<float>((bt ? 1 : -1) * o.separation * dir_t[c]);
    for (std::size_t c = 0; c < o.image_dim; ++c) image(v, c) += static_cast<float>((bi ? 1 : -1) * o.separation * dir_i[c]);
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto target = static_cast<std::size_t>(o.avg_degree * static_cast<double>(o.nodes) / 2.0);
  for (std::size_t e = 0; e < target && o.nodes > 1; ++e)
    edges.emplace_back(rng.uniform_index(o.nodes), rng.uniform_index(o.nodes));
  return assemble(std::move(labels), 2, std::move(text), std::move(image), edges, "movies");
}

MultimodalGraph two_block_graph(const TwoBlockOptions& o) {
  Rng rng(o.seed);
  std::vector<int> labels(o.nodes);
  for (std::size_t v = 0; v < o.nodes; ++v) labels[v] = v < o.nodes / 2 ? 0 : 1;
  std::vector<float> means_t[2] = {unit_direction(o.text_dim, rng), unit_direction(o.text_dim, rng)};
  std::vector<float> means_i[2] = {unit_direction(o.image_dim, rng), unit_direction(o.image_dim, rng)};
  const double noise_t = 1.0 / std::sqrt(static_cast<double>(o.text_dim));
  const double noise_i = 1.0 / std::sqrt(static_cast<double>(o.image_dim));
  Tensor text = gaussian_rows(o.nodes, o.text_dim, noise_t, rng);
  Tensor image = gaussian_rows(o.nodes, o.image_dim, noise_i, rng);
  for (std::size_t v = 0; v < o.nodes; ++v) {
    const int b = labels[v];
    for (std::size_t c = 0; c < o.text_dim; ++c) text(v, c) += static_cast<float>(o.signal * means_t[b][c]);
    for (std::size_t c = 0; c < o.image_dim; ++c) image(v, c) += static_cast<float>(o.signal * means_i[b][c]);
  }
  const auto edges = block_edges(labels, o.p_in, o.p_out, rng);
  return assemble(std::move(labels), 2, std::move(text), std::move(image), edges, "movies");
}

MultimodalGraph shaped_graph(const ShapedOptions& o) {
  const std::uint64_t max_edges = static_cast<std::uint64_t>(o.nodes) * (o.nodes - 1) / 2;
  if (o.nodes < 2 || o.edges > max_edges) throw Error(Errc::InvalidArgument, "edge count not realizable");
  Rng rng(o.seed);
  std::vector<int> labels(o.nodes);
  for (std::size_t v = 0; v < o.nodes; ++v) labels[v] = static_cast<int>(rng.uniform_index(o.classes));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(o.edges * 2);
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(o.edges);
  while (edges.size() < o.edges) {
    NodeId u = rng.uniform_index(o.nodes), v = rng.uniform_index(o.nodes);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert(static_cast<std::uint64_t>(u) * o.nodes + v).second) edges.emplace_back(u, v);
  }
  Tensor text = gaussian_rows(o.nodes, o.text_dim, 1.0, rng);
  Tensor image = gaussian_rows(o.nodes, o.image_dim, 1.0, rng);
  MultimodalGraph g = assemble(std::move(labels), o.classes, std::move(text), std::move(image), edges, o.domain);
  return g;
}

DatasetManifest write_dataset(const MultimodalGraph& graph, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.nodes = graph.num_nodes();
  m.edges = graph.adjacency.num_edges();
  m.classes = graph.classes.size();
  m.domain = graph.domain;
  m.files.nodes = dir / "nodes.jsonl";
  m.files.edges = dir / "edges.csv";
  m.files.classes = dir / "classes.txt";
  m.files.domain = graph.domain;
  for (const auto& [modality, table] : graph.tables) {
    m.files.embeddings[modality] = dir / (std::string(modality_name(modality)) + ".emb");
  }
  write_graph(graph, m.files);
  for (const auto& n : graph.nodes) {
    if (!n.image_path) continue;
    const auto path = dir / *n.image_path;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "placeholder image " << n.id << '\n';
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  }
  nlohmann::ordered_json j{{"nodes", m.nodes}, {"edges", m.edges}, {"classes", m.classes}, {"domain", m.domain}};
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::Io, "cannot write manifest in " + dir.string());
  return m;
}

}  // namespace mmgl::synthetic
