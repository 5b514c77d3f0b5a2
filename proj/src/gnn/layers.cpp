#include "mmgl/gnn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"

namespace mmgl {
namespace {

void require_rows(const Tensor& x, const Adjacency& adjacency, const char* what) {
  if (x.rows() != adjacency.num_nodes()) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": " + std::to_string(x.rows()) +
                                         " feature rows for " + std::to_string(adjacency.num_nodes()) +
                                         " nodes");
  }
}

}  // namespace

GcnPropagator::GcnPropagator(const Adjacency& adjacency)
    : adjacency_(&adjacency), self_weight_(adjacency.num_nodes()), edge_weight_(adjacency.indices().size()) {
  const std::size_t n = adjacency.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) {
    const double d = static_cast<double>(adjacency.degree(v) + 1);
    inv_sqrt[v] = 1.0 / std::sqrt(d);
    self_weight_[v] = static_cast<float>(1.0 / d);
  }
  const auto offsets = adjacency.offsets();
  const auto indices = adjacency.indices();
  for (NodeId v = 0; v < n; ++v)
    for (std::size_t e = offsets[v]; e < offsets[v + 1]; ++e)
      edge_weight_[e] = static_cast<float>(inv_sqrt[v] * inv_sqrt[indices[e]]);
}

Tensor GcnPropagator::apply(const Tensor& x) const {
  require_rows(x, *adjacency_, "gcn propagate");
  Tensor out(x.rows(), x.cols());
  const auto offsets = adjacency_->offsets();
  const auto indices = adjacency_->indices();
  std::vector<double> acc(x.cols());
  for (NodeId v = 0; v < x.rows(); ++v) {
    const auto xv = x.row(v);
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] = static_cast<double>(self_weight_[v]) * xv[c];
    for (std::size_t e = offsets[v]; e < offsets[v + 1]; ++e) {
      const double w = edge_weight_[e];
      const auto xu = x.row(indices[e]);
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * xu[c];
    }
    auto dst = out.row(v);
    for (std::size_t c = 0; c < acc.size(); ++c) dst[c] = static_cast<float>(acc[c]);
  }
  return out;
}

Tensor MeanAggregator::forward(const Tensor& x) const {
  require_rows(x, *adjacency_, "mean aggregate");
  Tensor out(x.rows(), x.cols());
  std::vector<double> acc(x.cols());
  for (NodeId v = 0; v < x.rows(); ++v) {
    const auto nb = adjacency_->neighbors(v);
    if (nb.empty()) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (NodeId u : nb) {
      const auto xu = x.row(u);
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += xu[c];
    }
    auto dst = out.row(v);
    const double inv = 1.0 / static_cast<double>(nb.size());
    for (std::size_t c = 0; c < acc.size(); ++c) dst[c] = static_cast<float>(acc[c] * inv);
  }
  return out;
}

Tensor MeanAggregator::backward(const Tensor& grad) const {
  require_rows(grad, *adjacency_, "mean aggregate backward");
  Tensor out(grad.rows(), grad.cols());
  for (NodeId v = 0; v < grad.rows(); ++v) {
    const auto nb = adjacency_->neighbors(v);
    if (nb.empty()) continue;
    const float inv = 1.0f / static_cast<float>(nb.size());
    const auto gv = grad.row(v);
    for (NodeId u : nb) {
      auto dst = out.row(u);
      for (std::size_t c = 0; c < gv.size(); ++c) dst[c] += gv[c] * inv;
    }
  }
  return out;
}

Tensor gcn_layer(const Tensor& x, const Adjacency& adjacency, const Tensor& weight, bool activate) {
  const GcnPropagator prop(adjacency);
  Tensor z = matmul(prop.apply(x), weight);
  return activate ? relu(z) : z;
}

Tensor sage_layer(const Tensor& x, const Adjacency& adjacency, const Tensor& w_self, const Tensor& w_neigh,
                  bool activate) {
  const MeanAggregator agg(adjacency);
  Tensor z = add(matmul(x, w_self), matmul(agg.forward(x), w_neigh));
  return activate ? relu(z) : z;
}

AttentionScores attention_coefficients(const Tensor& h, const Adjacency& adjacency, const Tensor& a_src,
                                       const Tensor& a_dst, float slope) {
  require_rows(h, adjacency, "attention");
  if (a_src.rows() != 1 || a_dst.rows() != 1 || a_src.cols() != h.cols() || a_dst.cols() != h.cols()) {
    throw Error(Errc::ShapeMismatch, "attention vectors " + a_src.shape_string() + "/" + a_dst.shape_string() +
                                         " for hidden width " + std::to_string(h.cols()));
  }
  const std::size_t n = h.rows();
  std::vector<double> src(n), dst(n);
  for (NodeId v = 0; v < n; ++v) {
    src[v] = dot(a_src.row(0), h.row(v));
    dst[v] = dot(a_dst.row(0), h.row(v));
  }
  const auto offsets = adjacency.offsets();
  const auto indices = adjacency.indices();
  AttentionScores out{std::vector<float>(indices.size()), std::vector<float>(indices.size())};
  std::vector<double> e;
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t begin = offsets[v], end = offsets[v + 1];
    if (begin == end) continue;
    e.assign(end - begin, 0.0);
    double mx = -INFINITY;
    for (std::size_t k = begin; k < end; ++k) {
      const double raw = src[v] + dst[indices[k]];
      out.raw[k] = static_cast<float>(raw);
      e[k - begin] = raw > 0.0 ? raw : slope * raw;
      mx = std::max(mx, e[k - begin]);
    }
    double z = 0.0;
    for (double& x : e) {
      x = std::exp(x - mx);
      z += x;
    }
    for (std::size_t k = begin; k < end; ++k) out.alpha[k] = static_cast<float>(e[k - begin] / z);
  }
  return out;
}

Tensor attention_aggregate(const Tensor& h, const Adjacency& adjacency, const AttentionScores& scores) {
  require_rows(h, adjacency, "attention aggregate");
  Tensor out(h.rows(), h.cols());
  const auto offsets = adjacency.offsets();
  const auto indices = adjacency.indices();
  std::vector<double> acc(h.cols());
  for (NodeId v = 0; v < h.rows(); ++v) {
    if (offsets[v] == offsets[v + 1]) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = offsets[v]; k < offsets[v + 1]; ++k) {
      const double a = scores.alpha[k];
      const auto hu = h.row(indices[k]);
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += a * hu[c];
    }
    auto dst = out.row(v);
    for (std::size_t c = 0; c < acc.size(); ++c) dst[c] = static_cast<float>(acc[c]);
  }
  return out;
}

}  // namespace mmgl
