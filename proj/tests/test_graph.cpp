#include <algorithm>
#include <set>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include "mmgl/graph/graph.hpp"
#include "mmgl/graph/io.hpp"
#include "mmgl/graph/neighbors.hpp"
#include "mmgl/graph/split.hpp"
#include "mmgl/numerics/tensor_io.hpp"

using namespace mmgl;
using fixture::error_code;

namespace {

MultimodalGraph graph_from_edges(std::size_t n, const std::vector<oracle::Edge>& edges, Tensor text) {
  MultimodalGraph g;
  g.classes = {"a", "b"};
  for (NodeId v = 0; v < n; ++v) g.nodes.push_back({v, "node", std::nullopt, std::nullopt, 0});
  g.adjacency = Adjacency::from_edges(n, edges);
  g.tables.emplace(Modality::text, EmbeddingTable{Modality::text, std::move(text)});
  return g;
}

struct SmallFixture {
  fixture::TempDir dir{"graph"};
  GraphFiles files;

  SmallFixture() {
    fixture::write_text(dir / "nodes.jsonl",
                        "{\"id\": 0, \"text\": \"first\", \"label\": 0, \"image_row\": 1}\n"
                        "{\"id\": 1, \"text\": \"second\", \"label\": 1}\n"
                        "{\"id\": 2, \"text\": \"\", \"label\": 1, \"image_row\": 0, \"image_path\": \"i/2.jpg\"}\n");
    fixture::write_text(dir / "edges.txt", "0,1\n1,2\n2,1\n1,1\n");
    fixture::write_text(dir / "classes.txt", "Comedy\nDrama\n");
    write_emb1(dir / "text.emb", Tensor(3, 4, 1.0f));
    write_emb1(dir / "image.emb", Tensor(2, 2, 0.5f));
    files.nodes = dir / "nodes.jsonl";
    files.edges = dir / "edges.txt";
    files.classes = dir / "classes.txt";
    files.embeddings = {{Modality::text, dir / "text.emb"}, {Modality::image, dir / "image.emb"}};
    files.domain = "movies";
  }
};

}  // namespace

TEST_CASE("adjacency cleanup") {
  const std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 0}, {2, 2}, {1, 2}, {0, 1}};
  EdgeStats stats;
  const Adjacency a = Adjacency::from_edges(4, edges, &stats);
  CHECK(a.num_edges() == 2);
  CHECK(stats.self_loops_dropped == 1);
  CHECK(stats.duplicates_dropped == 2);
  CHECK(a.has_edge(1, 0));
  CHECK(a.has_edge(2, 1));
  CHECK_FALSE(a.has_edge(2, 2));
  CHECK(a.degree(3) == 0);
  CHECK(a.edge_list() == std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}});
  CHECK(error_code([] {
          const std::vector<std::pair<NodeId, NodeId>> bad{{0, 5}};
          Adjacency::from_edges(3, bad);
        }) == Errc::InvalidNode);
}

TEST_CASE("adjacency is symmetric on random graphs") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(40);
    const auto edges = oracle::random_edges(n, 0.2, rng, true);
    const std::vector<std::pair<NodeId, NodeId>> converted(edges.begin(), edges.end());
    const Adjacency a = Adjacency::from_edges(n, converted);
    const auto dense = oracle::dense_adjacency(n, edges);
    for (NodeId u = 0; u < n; ++u) {
      CHECK(std::is_sorted(a.neighbors(u).begin(), a.neighbors(u).end()));
      for (NodeId v = 0; v < n; ++v) CHECK(a.has_edge(u, v) == (dense[u][v] != 0.0));
    }
  }
}

TEST_CASE("load_graph") {
  SmallFixture fx;
  SUBCASE("three-node fixture") {
    const LoadedGraph loaded = load_graph(fx.files);
    const MultimodalGraph& g = loaded.graph;
    CHECK(g.num_nodes() == 3);
    CHECK(g.adjacency.degree(0) == 1);
    CHECK(g.adjacency.degree(1) == 2);
    CHECK(g.adjacency.degree(2) == 1);
    CHECK(loaded.report.edges == 2);
    CHECK(loaded.report.edge_lines == 4);
    CHECK(loaded.report.edge_stats.self_loops_dropped == 1);
    CHECK(loaded.report.edge_stats.duplicates_dropped == 1);
    CHECK(loaded.report.classes == 2);
    CHECK(loaded.report.nodes_with_image_row == 2);
    CHECK(g.classes[1] == "Drama");
    CHECK(g.nodes[2].image_path == std::optional<std::string>("i/2.jpg"));
    CHECK(g.table(Modality::image).rows() == 2);
    CHECK(g.domain == "movies");
  }
  SUBCASE("image row out of range") {
    fixture::write_text(fx.dir / "nodes.jsonl", "{\"id\": 0, \"text\": \"x\", \"label\": 0, \"image_row\": 999}\n");
    write_emb1(fx.dir / "image.emb", Tensor(10, 2));
    fx.files.embeddings.erase(Modality::text);
    fixture::write_text(fx.dir / "edges.txt", "");
    const std::string msg = fixture::error_message([&] { load_graph(fx.files); });
    CHECK(msg.find("MissingEmbedding") != std::string::npos);
    CHECK(msg.find("node 0") != std::string::npos);
    CHECK(msg.find("image") != std::string::npos);
  }
  SUBCASE("text table too short") {
    write_emb1(fx.dir / "text.emb", Tensor(2, 4));
    CHECK(error_code([&] { load_graph(fx.files); }) == Errc::MissingEmbedding);
  }
  SUBCASE("unknown label") {
    fixture::write_text(fx.dir / "classes.txt", "Comedy\n");
    CHECK(error_code([&] { load_graph(fx.files); }) == Errc::UnknownLabel);
  }
  SUBCASE("malformed records carry the line number") {
    fixture::write_text(fx.dir / "edges.txt", "0,1\n1;2\n");
    const std::string msg = fixture::error_message([&] { load_graph(fx.files); });
    CHECK(msg.find("MalformedRecord") != std::string::npos);
    CHECK(msg.find("edges.txt:2") != std::string::npos);
  }
  SUBCASE("invalid JSON") {
    fixture::write_text(fx.dir / "nodes.jsonl", "{\"id\": 0, \"text\": \"x\", \"label\": 0}\n{oops\n");
    const std::string msg = fixture::error_message([&] { load_graph(fx.files); });
    CHECK(msg.find("nodes.jsonl:2") != std::string::npos);
  }
  SUBCASE("write then load round trip") {
    const MultimodalGraph g = load_graph(fx.files).graph;
    fixture::TempDir out("graph_out");
    GraphFiles files{out / "n.jsonl", out / "e.txt", out / "c.txt", {}, "movies"};
    write_graph(g, files);
    files.embeddings = {{Modality::text, out / "n.text.emb"}, {Modality::image, out / "n.image.emb"}};
    const MultimodalGraph back = load_graph(files).graph;
    CHECK(back.adjacency.edge_list() == g.adjacency.edge_list());
    CHECK(back.table(Modality::text).data == g.table(Modality::text).data);
    CHECK(back.labels() == g.labels());
  }
}

TEST_CASE("split_nodes") {
  SUBCASE("ten nodes give 6/2/2") {
    const auto s = split_nodes(10, {}, 1);
    CHECK(s.train.size() == 6);
    CHECK(s.val.size() == 2);
    CHECK(s.test.size() == 2);
  }
  SUBCASE("deterministic and seed-dependent") {
    const auto a = split_nodes(100, {}, 5), b = split_nodes(100, {}, 5), c = split_nodes(100, {}, 6);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.train != c.train);
  }
  SUBCASE("partition property over random sizes") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.uniform_index(500);
      const auto s = split_nodes(n, {}, rng.next());
      std::set<NodeId> all;
      for (const auto* part : {&s.train, &s.val, &s.test}) all.insert(part->begin(), part->end());
      CHECK(all.size() == n);
      CHECK(s.train.size() + s.val.size() + s.test.size() == n);
      CHECK(std::abs(static_cast<double>(s.train.size()) - 0.6 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(s.val.size()) - 0.2 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(s.test.size()) - 0.2 * n) <= 1.0);
    }
  }
  SUBCASE("fourteen nodes keep train within one of its share") {
    const auto s = split_nodes(14, {}, 2);
    CHECK(s.val.size() == 3);
    CHECK(s.test.size() == 3);
    CHECK(s.train.size() == 8);
  }
  SUBCASE("bad ratios") {
    CHECK(error_code([] { split_nodes(10, {0.5, 0.5, 0.5}, 0); }) == Errc::BadRatios);
    CHECK(error_code([] { split_nodes(10, {1.0, 0.0, 0.0}, 0); }) == Errc::BadRatios);
  }
}

TEST_CASE("sample_neighbors") {
  const std::vector<oracle::Edge> edges{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}, {1, 2}};
  const MultimodalGraph g = graph_from_edges(9, edges, Tensor(9, 2, 1.0f));
  SUBCASE("subset of hop-1 with min(m, degree) elements") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = sample_neighbors(g, 0, 5, seed);
      CHECK(s.size() == 5);
      CHECK(std::set<NodeId>(s.begin(), s.end()).size() == 5);
      for (NodeId u : s) CHECK(g.adjacency.has_edge(0, u));
    }
    CHECK(sample_neighbors(g, 0, 5, 3) == sample_neighbors(g, 0, 5, 3));
  }
  SUBCASE("degree at most m returns every neighbor") {
    auto s = sample_neighbors(g, 1, 5, 9);
    std::sort(s.begin(), s.end());
    CHECK(s == std::vector<NodeId>{0, 2});
  }
  SUBCASE("isolated node") { CHECK(sample_neighbors(g, 8, 5, 0).empty()); }
}

TEST_CASE("top_k_similar_neighbors") {
  SUBCASE("hand-set vectors") {
    const std::vector<oracle::Edge> edges{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}};
    const Tensor f = Tensor::from_rows({{1, 0}, {0, 1}, {1, 1}, {1, 0.1f}, {-1, 0}, {2, 0}});
    const MultimodalGraph g = graph_from_edges(6, edges, f);
    StructureSelectSpec spec;
    CHECK(spec.k == 3);
    CHECK(spec.hops == 1);
    // cos: 1 → 0, 2 → .707, 3 → .995, 4 → −1, 5 → 1
    CHECK(top_k_similar_neighbors(g, 0, spec, f) == std::vector<NodeId>{5, 3, 2});
  }
  SUBCASE("identical vectors resolve by ascending id") {
    const std::vector<oracle::Edge> edges{{0, 3}, {0, 1}};
    const Tensor f = Tensor::from_rows({{1, 0}, {0.5f, 0.5f}, {9, 9}, {0.5f, 0.5f}});
    const MultimodalGraph g = graph_from_edges(4, edges, f);
    CHECK(top_k_similar_neighbors(g, 0, {}, f) == std::vector<NodeId>{1, 3});
  }
  SUBCASE("zero feature rows rank with similarity 0") {
    const std::vector<oracle::Edge> edges{{0, 1}, {0, 2}};
    const Tensor f = Tensor::from_rows({{1, 0}, {0, 0}, {-1, 0}});
    const MultimodalGraph g = graph_from_edges(3, edges, f);
    CHECK(top_k_similar_neighbors(g, 0, {}, f) == std::vector<NodeId>{1, 2});
  }
  SUBCASE("matches exhaustive ranking on random graphs") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng.uniform_index(199);
      const auto edges = oracle::random_edges(n, 3.0 / static_cast<double>(n), rng);
      // Small integer features make exact ties common.
      Tensor f(n, 3);
      for (auto& v : f.values()) v = static_cast<float>(static_cast<int>(rng.uniform_index(3)) - 1);
      const MultimodalGraph g = graph_from_edges(n, edges, f);
      const auto dense = oracle::dense_adjacency(n, edges);
      const auto mat = oracle::to_mat(f);
      StructureSelectSpec spec;
      spec.hops = 1 + static_cast<std::size_t>(trial % 2);
      for (NodeId v = 0; v < n; v += 1 + n / 20)
        CHECK(top_k_similar_neighbors(g, v, spec, f) == oracle::topk_bruteforce(dense, mat, v, spec.k, spec.hops));
    }
  }
  SUBCASE("spec validation") {
    StructureSelectSpec spec;
    spec.k = 0;
    CHECK(error_code([&] { spec.validate(); }) == Errc::InvalidArgument);
  }
}
