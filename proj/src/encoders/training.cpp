#include "mmgl/encoders/training.hpp"

#include <fstream>
#include <numeric>

#include "json.hpp"
#include "mmgl/encoders/contrastive.hpp"
#include "mmgl/error.hpp"
#include "mmgl/graph/neighbors.hpp"
#include "mmgl/numerics/ops.hpp"
#include "mmgl/numerics/random.hpp"
#include "mmgl/numerics/tensor_io.hpp"

namespace mmgl {
namespace {

void require_both(const MultimodalGraph& graph) {
  if (!graph.has_table(Modality::text) || !graph.has_table(Modality::image))
    throw Error(Errc::ModalityUnavailable, "encoder training needs text and image tables");
}

std::vector<NodeId> all_nodes(const MultimodalGraph& graph) {
  std::vector<NodeId> ids(graph.num_nodes());
  std::iota(ids.begin(), ids.end(), NodeId{0});
  return ids;
}

std::vector<std::vector<std::size_t>> make_batches(std::span<const NodeId> order, std::size_t batch_size,
                                                   bool fold_singleton) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  if (fold_singleton && batch_size > 1 && batches.size() > 1 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

}  // namespace

void ContrastiveConfig::validate() const {
  if (!(tau > 0.0)) throw Error(Errc::InvalidArgument, "temperature must be positive");
  if (neighbors < 1) throw Error(Errc::InvalidArgument, "need at least one sampled neighbor");
  if (batch_size < 1) throw Error(Errc::InvalidArgument, "batch size must be positive");
  if (!(lr > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be positive");
}

Tensor project_concat(const MultimodalGraph& graph, const ProjectionHeads& heads) {
  return fuse_features(graph, {FusionMode::concat}, &heads).features;
}

double mean_neighbor_cosine(const MultimodalGraph& graph, const ProjectionHeads& heads) {
  const Tensor e = project_concat(graph, heads);
  const auto edges = graph.adjacency.edge_list();
  if (edges.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [u, v] : edges) total += cosine_similarity(e.row(u), e.row(v));
  return total / static_cast<double>(edges.size());
}

double mean_pair_cosine(const MultimodalGraph& graph, const ProjectionHeads& heads) {
  const Tensor t = fuse_features(graph, {FusionMode::text_only}, &heads).features;
  const Tensor i = fuse_features(graph, {FusionMode::image_only}, &heads).features;
  double total = 0.0;
  std::size_t count = 0;
  for (const NodeRecord& n : graph.nodes) {
    if (!n.image_row) continue;
    total += cosine_similarity(t.row(n.id), i.row(n.id));
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

TrainedEncoder train_structure_aware_encoder(const MultimodalGraph& graph, const ContrastiveConfig& cfg,
                                             std::optional<std::span<const NodeId>> anchors) {
  cfg.validate();
  require_both(graph);
  const Tensor xt = modality_matrix(graph, Modality::text);
  const Tensor xi = modality_matrix(graph, Modality::image);

  std::vector<NodeId> eligible;
  std::size_t skipped = 0;
  const std::vector<NodeId> everyone = anchors ? std::vector<NodeId>() : all_nodes(graph);
  const std::span<const NodeId> candidates = anchors ? *anchors : std::span<const NodeId>(everyone);
  for (NodeId v : candidates) {
    if (graph.adjacency.degree(v) == 0) {
      ++skipped;
      continue;
    }
    eligible.push_back(v);
  }
  if (eligible.empty()) throw Error(Errc::EmptyTrainSet, "no anchor has a hop-1 neighbor");

  TrainedEncoder out{ProjectionHeads::initialize(xt.cols(), xi.cols(), cfg.seed), {}};
  ProjectionHeads& heads = out.heads;
  out.report.skipped_nodes = skipped;
  out.report.cosine_before = mean_neighbor_cosine(graph, heads);

  const std::size_t dp = heads.proj_dim();
  const OptimConfig adam{cfg.lr};
  Parameter* params[] = {&heads.text, &heads.image};

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::uint64_t epoch_seed = derive_seed(cfg.seed, epoch + 1);
    Rng rng(epoch_seed);
    std::vector<NodeId> order = eligible;
    rng.shuffle(order);
    std::vector<NodeId> positives(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto drawn = sample_neighbors(graph, order[i], cfg.neighbors, epoch_seed);
      positives[i] = drawn[rng.uniform_index(drawn.size())];
    }
    std::vector<std::size_t> positions(order.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (const auto& batch : make_batches(positions, cfg.batch_size, false)) {
      std::vector<std::size_t> a_ids, p_ids;
      for (std::size_t pos : batch) {
        a_ids.push_back(order[pos]);
        p_ids.push_back(positives[pos]);
      }
      const Tensor at = gather_rows(xt, a_ids), ai = gather_rows(xi, a_ids);
      const Tensor pt = gather_rows(xt, p_ids), pi = gather_rows(xi, p_ids);
      const Tensor anchor_emb = concat_cols(matmul(at, heads.text.value), matmul(ai, heads.image.value));
      const Tensor pos_emb = concat_cols(matmul(pt, heads.text.value), matmul(pi, heads.image.value));
      const PairLoss loss = structure_contrastive_loss(anchor_emb, pos_emb, cfg.tau);

      const Tensor ga_t = slice_cols(loss.grad_first, 0, dp), ga_i = slice_cols(loss.grad_first, dp, 2 * dp);
      const Tensor gp_t = slice_cols(loss.grad_second, 0, dp), gp_i = slice_cols(loss.grad_second, dp, 2 * dp);
      heads.text.accumulate(matmul_at_b(at, ga_t));
      heads.text.accumulate(matmul_at_b(pt, gp_t));
      heads.image.accumulate(matmul_at_b(ai, ga_i));
      heads.image.accumulate(matmul_at_b(pi, gp_i));
      adam_step(params, adam);
      out.report.loss_curve.push_back(loss.loss);
      ++out.report.steps;
    }
  }
  out.report.cosine_after = mean_neighbor_cosine(graph, heads);
  return out;
}

TrainedEncoder train_pvlm_f(const MultimodalGraph& graph, const ContrastiveConfig& cfg,
                            std::optional<std::span<const NodeId>> nodes) {
  cfg.validate();
  require_both(graph);
  const Tensor xt = modality_matrix(graph, Modality::text);
  const Tensor xi = modality_matrix(graph, Modality::image);

  std::vector<NodeId> eligible;
  std::size_t skipped = 0;
  const std::vector<NodeId> everyone = nodes ? std::vector<NodeId>() : all_nodes(graph);
  for (NodeId v : nodes ? *nodes : std::span<const NodeId>(everyone)) {
    if (!graph.nodes.at(v).image_row) {
      ++skipped;
      continue;
    }
    eligible.push_back(v);
  }
  if (eligible.empty()) throw Error(Errc::EmptyTrainSet, "no node carries both modalities");

  TrainedEncoder out{ProjectionHeads::initialize(xt.cols(), xi.cols(), cfg.seed), {}};
  ProjectionHeads& heads = out.heads;
  out.report.skipped_nodes = skipped;
  out.report.cosine_before = mean_pair_cosine(graph, heads);

  const OptimConfig adam{cfg.lr};
  Parameter* params[] = {&heads.text, &heads.image};
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, epoch + 1));
    std::vector<NodeId> order = eligible;
    rng.shuffle(order);
    for (const auto& batch : make_batches(order, cfg.batch_size, true)) {
      const Tensor bt = gather_rows(xt, batch), bi = gather_rows(xi, batch);
      const PairLoss loss = clip_align_loss(matmul(bt, heads.text.value), matmul(bi, heads.image.value), cfg.tau);
      heads.text.accumulate(matmul_at_b(bt, loss.grad_first));
      heads.image.accumulate(matmul_at_b(bi, loss.grad_second));
      adam_step(params, adam);
      out.report.loss_curve.push_back(loss.loss);
      ++out.report.steps;
    }
  }
  out.report.cosine_after = mean_pair_cosine(graph, heads);
  return out;
}

void save_heads(const std::filesystem::path& dir, const ProjectionHeads& heads, const ContrastiveConfig& cfg,
                std::string_view variant) {
  std::filesystem::create_directories(dir);
  write_emb1(dir / "head_text.emb", heads.text.value);
  write_emb1(dir / "head_image.emb", heads.image.value);
  nlohmann::json manifest = {
      {"variant", variant},
      {"d_text", heads.text_dim()},
      {"d_image", heads.image_dim()},
      {"d_proj", heads.proj_dim()},
      {"seed", cfg.seed},
      {"config",
       {{"tau", cfg.tau},
        {"neighbors", cfg.neighbors},
        {"batch_size", cfg.batch_size},
        {"lr", cfg.lr},
        {"epochs", cfg.epochs},
        {"optimizer", "adam"}}},
      {"tensors", {{"text", "head_text.emb"}, {"image", "head_image.emb"}}},
  };
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

ProjectionHeads load_heads(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(Errc::Io, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedFile, (dir / "manifest.json").string() + ": " + e.what());
  }
  const auto tensors = manifest.at("tensors");
  ProjectionHeads heads = ProjectionHeads::from_weights(read_emb1(dir / tensors.at("text").get<std::string>()),
                                                        read_emb1(dir / tensors.at("image").get<std::string>()));
  if (heads.text_dim() != manifest.at("d_text").get<std::size_t>() ||
      heads.image_dim() != manifest.at("d_image").get<std::size_t>()) {
    throw Error(Errc::MalformedFile, "head tensors disagree with manifest dims in " + dir.string());
  }
  return heads;
}

}  // namespace mmgl
