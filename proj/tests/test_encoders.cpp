#include <cmath>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include "mmgl/encoders/contrastive.hpp"
#include "mmgl/encoders/fusion.hpp"
#include "mmgl/encoders/training.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/synthetic.hpp"

using namespace mmgl;
using fixture::error_code;

namespace {

MultimodalGraph tiny_graph(Tensor text, std::optional<Tensor> image, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  MultimodalGraph g;
  g.classes = {"x"};
  const std::size_t n = text.rows();
  for (NodeId v = 0; v < n; ++v) {
    NodeRecord r{v, "t", std::nullopt, std::nullopt, 0};
    if (image) r.image_row = v;
    g.nodes.push_back(r);
  }
  g.adjacency = Adjacency::from_edges(n, edges);
  g.tables.emplace(Modality::text, EmbeddingTable{Modality::text, std::move(text)});
  if (image) g.tables.emplace(Modality::image, EmbeddingTable{Modality::image, std::move(*image)});
  return g;
}

/// Text and image rows are independent noisy rotations of a shared latent.
MultimodalGraph rotated_pairs(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  const Tensor z = oracle::random_tensor(n, d, rng);
  const Tensor r1 = oracle::random_tensor(d, d, rng), r2 = oracle::random_tensor(d, d, rng);
  Tensor t = matmul(z, r1), v = matmul(z, r2);
  for (auto& x : t.values()) x += static_cast<float>(0.05 * rng.normal());
  for (auto& x : v.values()) x += static_cast<float>(0.05 * rng.normal());
  return tiny_graph(std::move(t), std::move(v), {});
}

}  // namespace

TEST_CASE("fuse_features") {
  Rng rng(2);
  const Tensor text = oracle::random_tensor(5, 4, rng), image = oracle::random_tensor(5, 6, rng);
  const MultimodalGraph g = tiny_graph(text, image, {{0, 1}});
  SUBCASE("concat widths and rows") {
    const Tensor f = fuse_features(g, {FusionMode::concat}).features;
    CHECK(f.cols() == 10);
    for (std::size_t v = 0; v < 5; ++v)
      for (std::size_t c = 0; c < 10; ++c) CHECK(f(v, c) == (c < 4 ? text(v, c) : image(v, c - 4)));
  }
  SUBCASE("text_only is the text table") { CHECK(fuse_features(g, {FusionMode::text_only}).features == text); }
  SUBCASE("image_only without an image table") {
    const MultimodalGraph t_only = tiny_graph(text, std::nullopt, {});
    CHECK(error_code([&] { fuse_features(t_only, {FusionMode::image_only}); }) == Errc::ModalityUnavailable);
    CHECK(error_code([&] { fuse_features(t_only, {FusionMode::concat}); }) == Errc::ModalityUnavailable);
  }
  SUBCASE("concat prefix equals identity-projected text") {
    const MultimodalGraph square = tiny_graph(text, oracle::random_tensor(5, 4, rng), {});
    const ProjectionHeads id = ProjectionHeads::from_weights(Tensor::identity(4), Tensor::identity(4));
    const Tensor concat = fuse_features(square, {FusionMode::concat}).features;
    CHECK(slice_cols(concat, 0, 4) == fuse_features(square, {FusionMode::text_only}, &id).features);
  }
  SUBCASE("missing image rows are zero-filled and counted") {
    MultimodalGraph partial = tiny_graph(text, image, {});
    partial.nodes[2].image_row.reset();
    const FusedFeatures f = fuse_features(partial, {FusionMode::concat});
    CHECK(f.zero_filled_rows == 1);
    for (std::size_t c = 4; c < 10; ++c) CHECK(f.features(2, c) == 0.0f);
  }
  SUBCASE("mode names round trip") {
    for (FusionMode m : {FusionMode::text_only, FusionMode::image_only, FusionMode::concat})
      CHECK(parse_fusion_mode(fusion_mode_name(m)) == m);
  }
}

TEST_CASE("clip_align_loss") {
  SUBCASE("orthonormal identical pairs") {
    const Tensor t = Tensor::from_rows({{1, 0}, {0, 1}});
    CHECK(clip_align_loss(t, t, 0.5).loss == doctest::Approx(-std::log(std::exp(2.0) / (std::exp(2.0) + 1.0))).epsilon(1e-9));
    CHECK(std::abs(clip_align_loss(t, t, 0.5).loss - 0.12693) < 1e-5);
  }
  SUBCASE("single pair is degenerate") {
    CHECK(error_code([] { clip_align_loss(Tensor(1, 3, 1.0f), Tensor(1, 3, 1.0f), 0.5); }) == Errc::DegenerateBatch);
  }
  SUBCASE("random n=4 matches brute force") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor t = oracle::random_tensor(4, 5, rng), v = oracle::random_tensor(4, 5, rng);
      CHECK(std::abs(clip_align_loss(t, v, 0.5).loss - oracle::clip_loss(oracle::to_mat(t), oracle::to_mat(v), 0.5)) <
            1e-6);
    }
  }
}

TEST_CASE("structure_contrastive_loss") {
  SUBCASE("single anchor equal to its positive") {
    const Tensor a = Tensor::from_rows({{0.3f, -1.2f, 2.0f}});
    CHECK(std::abs(structure_contrastive_loss(a, a, 0.5).loss) < 1e-12);
  }
  SUBCASE("hand-set B=2") {
    const Tensor a = Tensor::from_rows({{1, 0}, {0, 1}});
    const Tensor p = Tensor::from_rows({{1, 1}, {0, 1}});
    // Anchor 0: cos(a0,p0)=1/√2, denominators over anchors: e^{2}, e^{0}.
    const double l0 = -std::log(std::exp(std::sqrt(0.5) / 0.5) / (std::exp(2.0) + 1.0));
    const double l1 = -std::log(std::exp(2.0) / (1.0 + std::exp(2.0)));
    CHECK(std::abs(structure_contrastive_loss(a, p, 0.5).loss - 0.5 * (l0 + l1)) < 1e-6);
  }
  SUBCASE("empty batch") {
    CHECK(error_code([] { structure_contrastive_loss(Tensor(0, 3), Tensor(0, 3), 0.5); }) == Errc::DegenerateBatch);
  }
  SUBCASE("random batches match the direct formula") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      const Tensor a = oracle::random_tensor(16, 6, rng), p = oracle::random_tensor(16, 6, rng);
      CHECK(std::abs(structure_contrastive_loss(a, p, 0.5).loss -
                     oracle::structure_loss(oracle::to_mat(a), oracle::to_mat(p), 0.5)) < 1e-6);
    }
  }
  SUBCASE("invariant to uniform positive scaling") {
    Rng rng(12);
    const Tensor a = oracle::random_tensor(8, 5, rng), p = oracle::random_tensor(8, 5, rng);
    const double base = structure_contrastive_loss(a, p, 0.5).loss;
    for (float c : {0.5f, 3.0f})
      CHECK(std::abs(structure_contrastive_loss(scale(a, c), scale(p, c), 0.5).loss - base) < 1e-5);
  }
  SUBCASE("per-anchor terms equal the log-sum-exp form") {
    Rng rng(13);
    const Tensor a = oracle::random_tensor(6, 4, rng), p = oracle::random_tensor(6, 4, rng);
    const auto am = oracle::to_mat(a), pm = oracle::to_mat(p);
    double mean = 0.0, worst = -INFINITY;
    for (std::size_t i = 0; i < 6; ++i) {
      double lse = 0.0;
      for (std::size_t k = 0; k < 6; ++k) lse += std::exp(oracle::cosine(am[i], am[k]) / 0.5);
      const double term = oracle::cosine(am[i], pm[i]) / 0.5 - std::log(lse);
      mean -= term / 6.0;
      worst = std::max(worst, term);
    }
    const double loss = structure_contrastive_loss(a, p, 0.5).loss;
    CHECK(std::abs(loss - mean) < 1e-6);
    CHECK(loss >= -worst - 1e-9);
  }
}

TEST_CASE("contrastive gradients match finite differences") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor a = oracle::random_tensor(4, 3, rng), b = oracle::random_tensor(4, 3, rng);
    const PairLoss s = structure_contrastive_loss(a, b, 0.5);
    auto sl = [&] { return structure_contrastive_loss(a, b, 0.5).loss; };
    CHECK(oracle::fd_relative_error(sl, a, s.grad_first) < 1e-3);
    CHECK(oracle::fd_relative_error(sl, b, s.grad_second) < 1e-3);
    const PairLoss c = clip_align_loss(a, b, 0.5);
    auto cl = [&] { return clip_align_loss(a, b, 0.5).loss; };
    CHECK(oracle::fd_relative_error(cl, a, c.grad_first) < 1e-3);
    CHECK(oracle::fd_relative_error(cl, b, c.grad_second) < 1e-3);
  }
}

TEST_CASE("structure-aware encoder training") {
  ContrastiveConfig defaults;
  CHECK(defaults.lr == 1e-5);
  CHECK(defaults.neighbors == 5);
  CHECK(defaults.epochs == 1);
  CHECK(defaults.batch_size == 16);
  CHECK(defaults.tau == 0.5);

  SUBCASE("all isolated nodes") {
    Rng rng(1);
    const MultimodalGraph g = tiny_graph(oracle::random_tensor(6, 3, rng), oracle::random_tensor(6, 3, rng), {});
    CHECK(error_code([&] { train_structure_aware_encoder(g, {}); }) == Errc::EmptyTrainSet);
  }
  SUBCASE("missing image table") {
    Rng rng(1);
    const MultimodalGraph g = tiny_graph(oracle::random_tensor(3, 3, rng), std::nullopt, {{0, 1}});
    CHECK(error_code([&] { train_structure_aware_encoder(g, {}); }) == Errc::ModalityUnavailable);
  }
  SUBCASE("two-block graph: neighbor cosine does not decrease") {
    synthetic::TwoBlockOptions opts;
    opts.nodes = 2000;
    opts.p_in = 0.01;
    opts.p_out = 0.0005;
    const MultimodalGraph g = synthetic::two_block_graph(opts);
    const TrainedEncoder enc = train_structure_aware_encoder(g, {});
    CHECK(enc.report.steps == (2000 + 15) / 16);
    CHECK(enc.report.loss_curve.size() == enc.report.steps);
    CHECK(enc.report.cosine_after >= enc.report.cosine_before);
    CHECK(enc.report.cosine_before == doctest::Approx(mean_neighbor_cosine(g, ProjectionHeads::initialize(64, 64, 0))));
  }
  SUBCASE("deterministic per seed") {
    synthetic::TwoBlockOptions opts;
    opts.nodes = 300;
    opts.p_in = 0.05;
    const MultimodalGraph g = synthetic::two_block_graph(opts);
    const auto a = train_structure_aware_encoder(g, {}), b = train_structure_aware_encoder(g, {});
    CHECK(a.heads.text.value == b.heads.text.value);
    CHECK(a.report.loss_curve == b.report.loss_curve);
  }
}

TEST_CASE("cross-modal encoder training") {
  SUBCASE("pair cosine improves on rotated pairs") {
    const MultimodalGraph g = rotated_pairs(256, 8, 5);
    ContrastiveConfig cfg;
    cfg.lr = 1e-3;
    cfg.epochs = 5;
    const TrainedEncoder enc = train_pvlm_f(g, cfg);
    CHECK(enc.report.cosine_after > enc.report.cosine_before + 0.05);
  }
  SUBCASE("zero epochs keeps the initial heads") {
    const MultimodalGraph g = rotated_pairs(20, 4, 1);
    ContrastiveConfig cfg;
    cfg.epochs = 0;
    const TrainedEncoder enc = train_pvlm_f(g, cfg);
    const ProjectionHeads init = ProjectionHeads::initialize(4, 4, cfg.seed);
    CHECK(enc.heads.text.value == init.text.value);
    CHECK(fuse_features(g, {FusionMode::concat}, &enc.heads).features ==
          concat_cols(matmul(g.table(Modality::text).data, init.text.value),
                      matmul(g.table(Modality::image).data, init.image.value)));
  }
  SUBCASE("batch size one") {
    const MultimodalGraph g = rotated_pairs(5, 4, 1);
    ContrastiveConfig cfg;
    cfg.batch_size = 1;
    CHECK(error_code([&] { train_pvlm_f(g, cfg); }) == Errc::DegenerateBatch);
  }
}

TEST_CASE("projection heads") {
  const ProjectionHeads h = ProjectionHeads::initialize(9, 4, 3);
  CHECK(h.proj_dim() == 4);
  CHECK(h.text.value.rows() == 9);
  for (float v : h.text.value.values()) CHECK(std::abs(v) <= 1.0f / 3.0f);
  CHECK(error_code([] { ProjectionHeads::from_weights(Tensor(2, 3), Tensor(2, 2)); }) == Errc::ShapeMismatch);

  SUBCASE("checkpoint round trip") {
    fixture::TempDir dir("heads");
    save_heads(dir.path(), h, {}, "structure");
    const ProjectionHeads back = load_heads(dir.path());
    CHECK(back.text.value == h.text.value);
    CHECK(back.image.value == h.image.value);
  }
  SUBCASE("projected dims") {
    Rng rng(3);
    const MultimodalGraph g = tiny_graph(oracle::random_tensor(3, 4, rng), oracle::random_tensor(3, 4, rng), {});
    const ProjectionHeads small = ProjectionHeads::from_weights(oracle::random_tensor(4, 3, rng),
                                                                oracle::random_tensor(4, 3, rng));
    CHECK(fuse_features(g, {FusionMode::concat}, &small).features.cols() == 6);
  }
}
