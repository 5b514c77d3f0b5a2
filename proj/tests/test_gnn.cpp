#include <cmath>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include "mmgl/encoders/fusion.hpp"
#include "mmgl/gnn/layers.hpp"
#include "mmgl/gnn/models.hpp"
#include "mmgl/gnn/trainer.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/synthetic.hpp"

using namespace mmgl;
using fixture::error_code;

namespace {

Adjacency adjacency_of(std::size_t n, const std::vector<oracle::Edge>& edges) {
  const std::vector<std::pair<NodeId, NodeId>> e(edges.begin(), edges.end());
  return Adjacency::from_edges(n, e);
}

oracle::Mat relu_mat(oracle::Mat m) {
  for (auto& row : m)
    for (auto& v : row) v = std::max(0.0, v);
  return m;
}

oracle::Mat add_mat(const oracle::Mat& a, const oracle::Mat& b) {
  oracle::Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] += b[i][j];
  return out;
}

oracle::Mat add_bias(oracle::Mat m, const Tensor& b) {
  for (auto& row : m)
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b(0, j);
  return m;
}

/// Direct attention layer: softmax over N(v) of LeakyReLU(a_src·h_v + a_dst·h_u).
oracle::Mat attention_layer(const oracle::Mat& adj, const oracle::Mat& x, const Tensor& w, const Tensor& a_src,
                            const Tensor& a_dst, std::vector<std::vector<double>>* alphas = nullptr) {
  const oracle::Mat h = oracle::naive_matmul(x, oracle::to_mat(w));
  const std::size_t n = adj.size(), d = h.empty() ? 0 : h[0].size();
  oracle::Mat out = h;
  if (alphas) alphas->assign(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<double> e(n, 0.0);
    double den = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (adj[v][u] == 0.0) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += a_src(0, c) * h[v][c] + a_dst(0, c) * h[u][c];
      e[u] = std::exp(s > 0 ? s : 0.2 * s);
      den += e[u];
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (adj[v][u] == 0.0) continue;
      const double alpha = e[u] / den;
      if (alphas) (*alphas)[v][u] = alpha;
      for (std::size_t c = 0; c < d; ++c) out[v][c] += alpha * h[u][c];
    }
  }
  return relu_mat(out);
}

double total_loss(const NodeClassifier& model, const GraphOperators& ops, const std::vector<const Tensor*>& inputs,
                  const std::vector<int>& labels) {
  return softmax_cross_entropy(model.forward(ops, inputs, nullptr).logits, labels).loss;
}

}  // namespace

TEST_CASE("gcn_layer") {
  SUBCASE("isolated node with identity weight keeps its row") {
    const Adjacency a = adjacency_of(3, {{0, 1}});
    const Tensor x = Tensor::from_rows({{1, 2}, {3, 4}, {5, -6}});
    const Tensor h = gcn_layer(x, a, Tensor::identity(2), false);
    CHECK(h(2, 0) == 5.0f);
    CHECK(h(2, 1) == -6.0f);
  }
  SUBCASE("two-node path matches the dense product") {
    Rng rng(1);
    const Tensor x = oracle::random_tensor(2, 3, rng), w = oracle::random_tensor(3, 2, rng);
    const auto adj = oracle::dense_adjacency(2, {{0, 1}});
    CHECK(oracle::max_abs_diff(gcn_layer(x, adjacency_of(2, {{0, 1}}), w, true),
                               oracle::dense_gcn(adj, oracle::to_mat(x), oracle::to_mat(w), true)) < 1e-5);
  }
  SUBCASE("row count mismatch") {
    CHECK(error_code([] { gcn_layer(Tensor(3, 2), adjacency_of(2, {}), Tensor(2, 2)); }) == Errc::ShapeMismatch);
  }
  SUBCASE("random graphs match the dense oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.uniform_index(50);
      const auto edges = oracle::random_edges(n, 0.15, rng, true);
      const Tensor x = oracle::random_tensor(n, 4, rng), w = oracle::random_tensor(4, 3, rng);
      const bool act = trial % 2 == 0;
      CHECK(oracle::max_abs_diff(gcn_layer(x, adjacency_of(n, edges), w, act),
                                 oracle::dense_gcn(oracle::dense_adjacency(n, edges), oracle::to_mat(x),
                                                   oracle::to_mat(w), act)) < 1e-5);
    }
  }
}

TEST_CASE("sage_layer") {
  Rng rng(2);
  SUBCASE("isolated node uses only the self term") {
    const Tensor x = oracle::random_tensor(2, 3, rng), ws = oracle::random_tensor(3, 3, rng),
                 wn = oracle::random_tensor(3, 3, rng);
    const Tensor h = sage_layer(x, adjacency_of(2, {}), ws, wn);
    CHECK(h == relu(matmul(x, ws)));
  }
  SUBCASE("star center with identical leaves aggregates to the leaf row") {
    Tensor x(4, 2);
    x(0, 0) = 9;
    for (std::size_t v = 1; v < 4; ++v) x(v, 0) = 2, x(v, 1) = -1;
    const Tensor h = sage_layer(x, adjacency_of(4, {{0, 1}, {0, 2}, {0, 3}}), Tensor(2, 2), Tensor::identity(2), false);
    CHECK(h(0, 0) == doctest::Approx(2.0));
    CHECK(h(0, 1) == doctest::Approx(-1.0));
  }
  SUBCASE("random graphs match the per-node loop") {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.uniform_index(50);
      const auto edges = oracle::random_edges(n, 0.15, rng, true);
      const Tensor x = oracle::random_tensor(n, 4, rng), ws = oracle::random_tensor(4, 3, rng),
                   wn = oracle::random_tensor(4, 3, rng);
      const bool act = trial % 2 == 1;
      CHECK(oracle::max_abs_diff(sage_layer(x, adjacency_of(n, edges), ws, wn, act),
                                 oracle::loop_sage(oracle::dense_adjacency(n, edges), oracle::to_mat(x),
                                                   oracle::to_mat(ws), oracle::to_mat(wn), act)) < 1e-5);
    }
  }
  SUBCASE("weight shape mismatch") {
    CHECK(error_code([] { sage_layer(Tensor(2, 3), adjacency_of(2, {}), Tensor(3, 2), Tensor(2, 2)); }) ==
          Errc::ShapeMismatch);
  }
}

TEST_CASE("attention coefficients") {
  SUBCASE("single neighbor gets weight one") {
    Rng rng(3);
    const Tensor h = oracle::random_tensor(2, 3, rng);
    const auto s = attention_coefficients(h, adjacency_of(2, {{0, 1}}), oracle::random_tensor(1, 3, rng),
                                          oracle::random_tensor(1, 3, rng));
    CHECK(s.alpha == std::vector<float>{1.0f, 1.0f});
  }
  SUBCASE("equal logits over four neighbors") {
    const Tensor h(5, 2, 1.0f);
    const auto s = attention_coefficients(h, adjacency_of(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), Tensor(1, 2, 0.3f),
                                          Tensor(1, 2, -0.7f));
    for (std::size_t i = 0; i < 4; ++i) CHECK(s.alpha[i] == doctest::Approx(0.25));
  }
  SUBCASE("random instances match a direct softmax") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const auto edges = oracle::random_edges(5, 0.5, rng);
      const Adjacency a = adjacency_of(5, edges);
      const Tensor x = oracle::random_tensor(5, 3, rng), w = Tensor::identity(3);
      const Tensor as = oracle::random_tensor(1, 3, rng), ad = oracle::random_tensor(1, 3, rng);
      std::vector<std::vector<double>> expected;
      attention_layer(oracle::dense_adjacency(5, edges), oracle::to_mat(x), w, as, ad, &expected);
      const auto s = attention_coefficients(x, a, as, ad);
      for (NodeId v = 0; v < 5; ++v) {
        const auto nb = a.neighbors(v);
        for (std::size_t i = 0; i < nb.size(); ++i)
          CHECK(std::abs(s.alpha[a.offsets()[v] + i] - expected[v][nb[i]]) < 1e-6);
      }
    }
  }
}

TEST_CASE("multimodal models against stage-by-stage oracles") {
  Rng rng(5);
  const std::size_t n = 7;
  const auto edges = oracle::random_edges(n, 0.4, rng);
  const Adjacency adj = adjacency_of(n, edges);
  const GraphOperators ops(adj);
  const auto dense = oracle::dense_adjacency(n, edges);
  const Tensor xt = oracle::random_tensor(n, 3, rng), xi = oracle::random_tensor(n, 2, rng);
  const std::vector<std::size_t> dims{3, 2};
  GnnConfig cfg;
  cfg.hidden = 4;
  cfg.dropout = 0.0;

  SUBCASE("mmgcn-lite") {
    cfg.model = ModelKind::mmgcn;
    auto model = make_model(cfg, dims, 3);
    oracle::Mat fused;
    for (const char* b : {"text", "image"}) {
      oracle::Mat h = oracle::to_mat(std::string(b) == "text" ? xt : xi);
      for (int l = 0; l < 2; ++l)
        h = oracle::dense_gcn(dense, h, oracle::to_mat(model->param(std::string(b) + ".gcn.w" + std::to_string(l)).value),
                              true);
      const auto q = oracle::naive_matmul(h, oracle::to_mat(model->param(std::string(b) + ".proj").value));
      fused = fused.empty() ? q : add_mat(fused, q);
    }
    const auto expected =
        add_bias(oracle::naive_matmul(fused, oracle::to_mat(model->param("classifier.w").value)),
                 model->param("classifier.b").value);
    const std::vector<const Tensor*> in{&xt, &xi};
    CHECK(oracle::max_abs_diff(model->forward(ops, in, nullptr).logits, expected) < 1e-5);
  }
  SUBCASE("mmgcn-lite null image branch equals the text path alone") {
    cfg.model = ModelKind::mmgcn;
    auto model = make_model(cfg, dims, 3);
    model->param("image.proj").value.fill(0.0f);
    const Tensor zero(n, 2);
    oracle::Mat h = oracle::to_mat(xt);
    for (int l = 0; l < 2; ++l)
      h = oracle::dense_gcn(dense, h, oracle::to_mat(model->param("text.gcn.w" + std::to_string(l)).value), true);
    const auto expected = add_bias(
        oracle::naive_matmul(oracle::naive_matmul(h, oracle::to_mat(model->param("text.proj").value)),
                             oracle::to_mat(model->param("classifier.w").value)),
        model->param("classifier.b").value);
    const std::vector<const Tensor*> in{&xt, &zero};
    CHECK(oracle::max_abs_diff(model->forward(ops, in, nullptr).logits, expected) < 1e-5);
  }
  SUBCASE("mgat-lite") {
    cfg.model = ModelKind::mgat;
    auto model = make_model(cfg, dims, 3);
    model->param("gate").value(0, 0) = 0.4f;
    oracle::Mat reps[2];
    int b = 0;
    for (const char* name : {"text", "image"}) {
      oracle::Mat h = oracle::to_mat(b == 0 ? xt : xi);
      for (int l = 0; l < 2; ++l) {
        const std::string p = std::string(name) + ".att" + std::to_string(l);
        h = attention_layer(dense, h, model->param(p + ".w").value, model->param(p + ".a_src").value,
                            model->param(p + ".a_dst").value);
      }
      reps[b++] = h;
    }
    const double g = 1.0 / (1.0 + std::exp(-0.4));
    oracle::Mat fused = reps[0];
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t c = 0; c < 4; ++c) fused[v][c] = g * reps[0][v][c] + (1 - g) * reps[1][v][c];
    const auto expected = add_bias(oracle::naive_matmul(fused, oracle::to_mat(model->param("classifier.w").value)),
                                   model->param("classifier.b").value);
    const std::vector<const Tensor*> in{&xt, &xi};
    CHECK(oracle::max_abs_diff(model->forward(ops, in, nullptr).logits, expected) < 1e-5);
  }
  SUBCASE("mismatched node counts across modalities") {
    for (ModelKind kind : {ModelKind::mmgcn, ModelKind::mgat}) {
      cfg.model = kind;
      auto model = make_model(cfg, dims, 3);
      const Tensor short_image(n - 1, 2);
      const std::vector<const Tensor*> in{&xt, &short_image};
      CHECK(error_code([&] { model->forward(ops, in, nullptr); }) == Errc::ModalityUnavailable);
      const std::vector<const Tensor*> one{&xt};
      CHECK(error_code([&] { model->forward(ops, one, nullptr); }) == Errc::ModalityUnavailable);
    }
  }
}

TEST_CASE("model gradients match finite differences") {
  Rng rng(77);
  for (ModelKind kind : {ModelKind::mlp, ModelKind::gcn, ModelKind::sage, ModelKind::mmgcn, ModelKind::mgat}) {
    CAPTURE(model_kind_name(kind));
    int clean = 0, attempts = 0;
    while (clean < 20 && attempts < 200) {
      ++attempts;
      const std::size_t n = 3 + rng.uniform_index(8);
      const auto edges = oracle::random_edges(n, 0.4, rng);
      const Adjacency adj = adjacency_of(n, edges);
      const GraphOperators ops(adj);
      GnnConfig cfg;
      cfg.model = kind;
      cfg.hidden = 4;
      cfg.layers = 1 + static_cast<std::size_t>(attempts % 2);
      cfg.seed = rng.next();
      const Tensor xt = oracle::random_tensor(n, 3, rng), xi = oracle::random_tensor(n, 2, rng);
      std::vector<const Tensor*> inputs{&xt};
      std::vector<std::size_t> dims{3};
      if (is_multimodal(kind)) {
        inputs.push_back(&xi);
        dims.push_back(2);
      }
      auto model = make_model(cfg, dims, 3);
      if (kind == ModelKind::mgat) model->param("gate").value(0, 0) = static_cast<float>(rng.uniform(-1, 1));
      std::vector<int> labels(n);
      for (auto& l : labels) l = static_cast<int>(rng.uniform_index(3));
      const ForwardPass pass = model->forward(ops, inputs, nullptr);
      const auto ce = softmax_cross_entropy(pass.logits, labels);
      for (auto& p : model->parameters()) p.zero_grad();
      model->backward(ops, pass, ce.grad);
      std::vector<Tensor*> values;
      std::vector<Tensor> grads;
      for (auto& p : model->parameters()) {
        values.push_back(&p.value);
        grads.push_back(p.grad);
      }
      const auto r = oracle::fd_check([&] { return total_loss(*model, ops, inputs, labels); }, values, grads);
      if (r.kink) continue;
      ++clean;
      CHECK(r.error < 1e-3);
    }
    CHECK(clean == 20);
  }
}

TEST_CASE("training") {
  SUBCASE("two-cluster graph: GCN reaches high test accuracy") {
    synthetic::TwoClusterOptions opts;
    opts.nodes = 400;
    const MultimodalGraph g = synthetic::two_cluster_graph(opts);
    const auto split = split_nodes(g, {}, 0);
    FeatureSet fs{{g.table(Modality::text).data}};
    GnnConfig cfg;
    const TrainedModel m = train_node_classifier(g, fs, split, cfg);
    CHECK(m.metrics.train_loss.size() == 200);
    CHECK(m.metrics.test_accuracy >= 0.95);
    CHECK(m.metrics.test_accuracy == accuracy_on(m, g, fs, split.test));
  }
  SUBCASE("zero epochs stays near chance") {
    synthetic::TwoClusterOptions opts;
    opts.nodes = 400;
    opts.separation = 0.0;
    const MultimodalGraph g = synthetic::two_cluster_graph(opts);
    const auto split = split_nodes(g, {}, 0);
    FeatureSet fs{{g.table(Modality::text).data}};
    GnnConfig cfg;
    cfg.epochs = 0;
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      cfg.seed = seed;
      mean += train_node_classifier(g, fs, split, cfg).metrics.test_accuracy / 5.0;
    }
    CHECK(std::abs(mean - 0.5) <= 0.15);
  }
  SUBCASE("xor multimodal: concat succeeds where each modality fails") {
    const MultimodalGraph g = synthetic::xor_multimodal_graph({});
    const auto split = split_nodes(g, {}, 0);
    GnnConfig cfg;
    cfg.model = ModelKind::mlp;
    auto acc = [&](FusionMode mode) {
      FeatureSet fs{{fuse_features(g, {mode}).features}};
      return train_node_classifier(g, fs, split, cfg).metrics.test_accuracy;
    };
    CHECK(acc(FusionMode::concat) >= 0.9);
    CHECK(acc(FusionMode::text_only) <= 0.65);
    CHECK(acc(FusionMode::image_only) <= 0.65);
  }
  SUBCASE("multimodal models train on separate inputs") {
    synthetic::TwoClusterOptions opts;
    opts.nodes = 200;
    const MultimodalGraph g = synthetic::two_cluster_graph(opts);
    const auto split = split_nodes(g, {}, 0);
    FeatureSet fs{{g.table(Modality::text).data, g.table(Modality::image).data}};
    for (ModelKind kind : {ModelKind::mmgcn, ModelKind::mgat}) {
      GnnConfig cfg;
      cfg.model = kind;
      cfg.epochs = 50;
      CHECK(train_node_classifier(g, fs, split, cfg).metrics.test_accuracy >= 0.8);
    }
  }
}

TEST_CASE("prediction") {
  synthetic::TwoClusterOptions opts;
  opts.nodes = 60;
  const MultimodalGraph g = synthetic::two_cluster_graph(opts);
  const auto split = split_nodes(g, {}, 0);
  FeatureSet fs{{g.table(Modality::text).data}};
  GnnConfig cfg;
  cfg.epochs = 20;
  const TrainedModel m = train_node_classifier(g, fs, split, cfg);

  SUBCASE("argmax and tie rule") {
    CHECK(argmax_rows(Tensor::from_rows({{0.1f, 2.0f, -1.0f}})) == std::vector<int>{1});
    CHECK(argmax_rows(Tensor::from_rows({{3, 3, 1}})) == std::vector<int>{0});
  }
  SUBCASE("deterministic and shift-invariant") {
    const Prediction a = predict(m, g, fs, split.test), b = predict(m, g, fs, split.test);
    CHECK(a.labels == b.labels);
    CHECK(a.scores == b.scores);
    Tensor shifted = a.scores;
    for (auto& v : shifted.values()) v += 5.0f;
    CHECK(argmax_rows(shifted) == a.labels);
  }
  SUBCASE("feature width mismatch") {
    FeatureSet wrong{{Tensor(g.num_nodes(), 3)}};
    CHECK(error_code([&] { predict(m, g, wrong, split.test); }) == Errc::ShapeMismatch);
  }
  SUBCASE("checkpoint round trip") {
    fixture::TempDir dir("model");
    save_model(dir.path(), m);
    const TrainedModel back = load_model(dir.path());
    CHECK(back.config.model == m.config.model);
    CHECK(predict(back, g, fs, split.test).scores == predict(m, g, fs, split.test).scores);
  }
  SUBCASE("config validation") {
    GnnConfig bad;
    bad.dropout = 1.0;
    CHECK(error_code([&] { bad.validate(); }) == Errc::InvalidArgument);
    bad = {};
    bad.layers = 0;
    CHECK(error_code([&] { bad.validate(); }) == Errc::InvalidArgument);
  }
}
