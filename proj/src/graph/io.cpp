#include "mmgl/graph/io.hpp"

#include <charconv>
#include <fstream>

#include "json.hpp"

#include "mmgl/error.hpp"
#include "mmgl/numerics/tensor_io.hpp"

namespace mmgl {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  return out;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line,
                            const std::string& reason) {
  throw Error(Errc::MalformedRecord, path.string() + ":" + std::to_string(line) + ": " + reason);
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

std::size_t parse_index(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    malformed(path, line, "expected a non-negative integer, got '" + std::string(s) + "'");
  return value;
}

NodeRecord parse_node(const std::string& line, const std::filesystem::path& path, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    malformed(path, lineno, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) malformed(path, lineno, "expected a JSON object");
  NodeRecord n;
  auto require_uint = [&](const char* key) -> std::size_t {
    const auto it = j.find(key);
    if (it == j.end()) malformed(path, lineno, std::string("missing field '") + key + "'");
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
      malformed(path, lineno, std::string("field '") + key + "' must be a non-negative integer");
    return it->get<std::size_t>();
  };
  n.id = require_uint("id");
  const auto label = j.find("label");
  if (label == j.end()) malformed(path, lineno, "missing field 'label'");
  if (!label->is_number_integer()) malformed(path, lineno, "field 'label' must be an integer");
  n.label = label->get<int>();
  if (const auto t = j.find("text"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) malformed(path, lineno, "field 'text' must be a string");
    n.text = t->get<std::string>();
  }
  if (const auto r = j.find("image_row"); r != j.end() && !r->is_null()) n.image_row = require_uint("image_row");
  if (const auto p = j.find("image_path"); p != j.end() && !p->is_null()) {
    if (!p->is_string()) malformed(path, lineno, "field 'image_path' must be a string");
    n.image_path = p->get<std::string>();
  }
  if (n.text.empty() && !n.image_row && !n.image_path)
    malformed(path, lineno, "node " + std::to_string(n.id) + " has no text, image_row or image_path");
  return n;
}

}  // namespace

LoadedGraph load_graph(const GraphFiles& files) {
  LoadedGraph out;
  MultimodalGraph& g = out.graph;
  g.domain = files.domain;
  g.asset_root = files.nodes.parent_path();

  {
    auto in = open_input(files.classes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (line.empty()) malformed(files.classes, lineno, "empty class name");
      g.classes.push_back(line);
    }
    if (g.classes.empty()) malformed(files.classes, 0, "no classes");
  }

  {
    auto in = open_input(files.nodes);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::optional<NodeRecord>> slots;
    std::vector<std::size_t> line_of;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (blank(line)) continue;
      NodeRecord n = parse_node(line, files.nodes, lineno);
      if (n.id >= slots.size()) {
        slots.resize(n.id + 1);
        line_of.resize(n.id + 1);
      }
      if (slots[n.id]) malformed(files.nodes, lineno, "duplicate node id " + std::to_string(n.id));
      line_of[n.id] = lineno;
      slots[n.id] = std::move(n);
    }
    g.nodes.reserve(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i]) malformed(files.nodes, 0, "node ids are not contiguous: id " + std::to_string(i) + " missing");
      if (slots[i]->label < 0 || static_cast<std::size_t>(slots[i]->label) >= g.classes.size()) {
        throw Error(Errc::UnknownLabel, files.nodes.string() + ":" + std::to_string(line_of[i]) +
                                            ": node " + std::to_string(i) + " label " +
                                            std::to_string(slots[i]->label) + " not in [0," +
                                            std::to_string(g.classes.size()) + ")");
      }
      g.nodes.push_back(std::move(*slots[i]));
    }
  }

  {
    auto in = open_input(files.edges);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (blank(line)) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) malformed(files.edges, lineno, "expected 'src,dst'");
      const std::string_view sv(line);
      const NodeId u = parse_index(sv.substr(0, comma), files.edges, lineno);
      const NodeId v = parse_index(sv.substr(comma + 1), files.edges, lineno);
      if (u >= g.nodes.size() || v >= g.nodes.size())
        malformed(files.edges, lineno, "edge endpoint outside [0," + std::to_string(g.nodes.size()) + ")");
      edges.emplace_back(u, v);
    }
    out.report.edge_lines = edges.size();
    g.adjacency = Adjacency::from_edges(g.nodes.size(), edges, &out.report.edge_stats);
  }

  for (const auto& [modality, path] : files.embeddings) {
    EmbeddingTable table{modality, read_emb1(path)};
    if (table.dim() == 0) throw Error(Errc::MalformedFile, path.string() + ": embedding dim is 0");
    g.tables.emplace(modality, std::move(table));
  }
  if (const auto it = g.tables.find(Modality::text); it != g.tables.end()) {
    if (it->second.rows() < g.nodes.size()) {
      throw Error(Errc::MissingEmbedding, "node " + std::to_string(it->second.rows()) +
                                              " has no row in the text table (modality text)");
    }
  }
  for (const NodeRecord& n : g.nodes) {
    if (!n.image_row) continue;
    ++out.report.nodes_with_image_row;
    const auto it = g.tables.find(Modality::image);
    if (it == g.tables.end() || *n.image_row >= it->second.rows()) {
      throw Error(Errc::MissingEmbedding,
                  "node " + std::to_string(n.id) + " image_row " + std::to_string(*n.image_row) +
                      " does not resolve (modality image, table rows " +
                      std::to_string(it == g.tables.end() ? 0 : it->second.rows()) + ")");
    }
  }
  if (const auto it = g.tables.find(Modality::text); it != g.tables.end() && it->second.rows() > g.nodes.size()) {
    throw Error(Errc::MalformedFile, "text table has " + std::to_string(it->second.rows()) +
                                         " rows for " + std::to_string(g.nodes.size()) + " nodes");
  }

  g.validate();
  out.report.nodes = g.nodes.size();
  out.report.edges = g.adjacency.num_edges();
  out.report.classes = g.classes.size();
  return out;
}

void write_graph(const MultimodalGraph& graph, const GraphFiles& files) {
  {
    auto out = open_output(files.nodes);
    for (const NodeRecord& n : graph.nodes) {
      json j;
      j["id"] = n.id;
      j["text"] = n.text;
      j["label"] = n.label;
      if (n.image_row) j["image_row"] = *n.image_row;
      if (n.image_path) j["image_path"] = *n.image_path;
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open_output(files.edges);
    for (const auto& [u, v] : graph.adjacency.edge_list()) out << u << ',' << v << '\n';
  }
  {
    auto out = open_output(files.classes);
    for (const auto& c : graph.classes) out << c << '\n';
  }
  for (const auto& [modality, table] : graph.tables) {
    std::filesystem::path path;
    if (const auto it = files.embeddings.find(modality); it != files.embeddings.end()) {
      path = it->second;
    } else {
      path = files.nodes.parent_path() /
             (files.nodes.stem().string() + "." + std::string(modality_name(modality)) + ".emb");
    }
    write_emb1(path, table.data);
  }
}

}  // namespace mmgl
