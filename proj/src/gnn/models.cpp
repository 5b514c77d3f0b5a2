#include "mmgl/gnn/models.hpp"

#include <cmath>

#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"

namespace mmgl {
namespace {

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(fan_in, fan_out);
  for (auto& v : w.values()) v = static_cast<float>(rng.uniform(-bound, bound));
  return w;
}

/// Inverted dropout. `mask` stays empty when dropout is inactive.
Tensor apply_dropout(const Tensor& x, double p, Rng* rng, Tensor& mask) {
  if (!rng || p <= 0.0) return x;
  mask = Tensor(x.rows(), x.cols());
  const float keep_scale = static_cast<float>(1.0 / (1.0 - p));
  Tensor out = x;
  auto m = mask.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    m[i] = rng->uniform01() < p ? 0.0f : keep_scale;
    o[i] *= m[i];
  }
  return out;
}

void apply_mask(Tensor& grad, const Tensor& mask) {
  if (mask.empty()) return;
  auto g = grad.values();
  const auto m = mask.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= m[i];
}

std::vector<std::size_t> layer_widths(std::size_t in, std::size_t hidden, std::size_t layers, std::size_t out) {
  std::vector<std::size_t> w{in};
  for (std::size_t l = 1; l < layers; ++l) w.push_back(hidden);
  w.push_back(out);
  return w;
}

template <typename Cache>
const Cache& cache_of(const ForwardPass& pass) {
  const auto* c = dynamic_cast<const Cache*>(pass.cache.get());
  if (!c) throw Error(Errc::InvalidArgument, "backward called with a cache from a different model");
  return *c;
}

// ---------------------------------------------------------------- MLP

class MlpModel final : public NodeClassifier {
 public:
  MlpModel(const GnnConfig& cfg, std::size_t in, std::size_t classes)
      : NodeClassifier({in}, classes, cfg.dropout) {
    Rng rng(cfg.seed);
    const auto w = layer_widths(in, cfg.hidden, cfg.layers, classes);
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      params_.emplace_back("mlp.w" + std::to_string(l), glorot(w[l], w[l + 1], rng));
      params_.emplace_back("mlp.b" + std::to_string(l), Tensor(1, w[l + 1]));
    }
    layers_ = w.size() - 1;
  }

  ModelKind kind() const noexcept override { return ModelKind::mlp; }
  std::unique_ptr<NodeClassifier> clone() const override { return std::make_unique<MlpModel>(*this); }

  struct Cache : ForwardCache {
    std::vector<Tensor> inputs, masks, pre;
  };

  ForwardPass forward(const GraphOperators& ops, std::span<const Tensor* const> inputs, Rng* rng) const override {
    check_inputs(ops, inputs);
    auto cache = std::make_unique<Cache>();
    Tensor h = *inputs[0];
    for (std::size_t l = 0; l < layers_; ++l) {
      Tensor mask;
      Tensor x = apply_dropout(h, dropout_, rng, mask);
      Tensor z = linear_forward(x, params_[2 * l].value, params_[2 * l + 1].value);
      h = l + 1 < layers_ ? relu(z) : z;
      cache->inputs.push_back(std::move(x));
      cache->masks.push_back(std::move(mask));
      cache->pre.push_back(std::move(z));
    }
    return {std::move(h), std::move(cache)};
  }

  void backward(const GraphOperators&, const ForwardPass& pass, const Tensor& grad_logits) override {
    const Cache& c = cache_of<Cache>(pass);
    Tensor g = grad_logits;
    for (std::size_t l = layers_; l-- > 0;) {
      if (l + 1 < layers_) g = relu_backward(g, c.pre[l]);
      LinearGrads lg = linear_backward(c.inputs[l], params_[2 * l].value, g);
      params_[2 * l].accumulate(lg.weight);
      params_[2 * l + 1].accumulate(lg.bias);
      g = std::move(lg.input);
      apply_mask(g, c.masks[l]);
    }
  }

 private:
  std::size_t layers_ = 0;
};

// ---------------------------------------------------------------- GCN

class GcnModel final : public NodeClassifier {
 public:
  GcnModel(const GnnConfig& cfg, std::size_t in, std::size_t classes)
      : NodeClassifier({in}, classes, cfg.dropout) {
    Rng rng(cfg.seed);
    const auto w = layer_widths(in, cfg.hidden, cfg.layers, classes);
    for (std::size_t l = 0; l + 1 < w.size(); ++l)
      params_.emplace_back("gcn.w" + std::to_string(l), glorot(w[l], w[l + 1], rng));
  }

  ModelKind kind() const noexcept override { return ModelKind::gcn; }
  std::unique_ptr<NodeClassifier> clone() const override { return std::make_unique<GcnModel>(*this); }

  struct Cache : ForwardCache {
    std::vector<Tensor> propagated, masks, pre;
  };

  ForwardPass forward(const GraphOperators& ops, std::span<const Tensor* const> inputs, Rng* rng) const override {
    check_inputs(ops, inputs);
    auto cache = std::make_unique<Cache>();
    Tensor h = *inputs[0];
    const std::size_t layers = params_.size();
    for (std::size_t l = 0; l < layers; ++l) {
      Tensor mask;
      Tensor p = ops.gcn.apply(apply_dropout(h, dropout_, rng, mask));
      Tensor z = matmul(p, params_[l].value);
      require_finite(z, "gcn layer");
      h = l + 1 < layers ? relu(z) : z;
      cache->propagated.push_back(std::move(p));
      cache->masks.push_back(std::move(mask));
      cache->pre.push_back(std::move(z));
    }
    return {std::move(h), std::move(cache)};
  }

  void backward(const GraphOperators& ops, const ForwardPass& pass, const Tensor& grad_logits) override {
    const Cache& c = cache_of<Cache>(pass);
    const std::size_t layers = params_.size();
    Tensor g = grad_logits;
    for (std::size_t l = layers; l-- > 0;) {
      if (l + 1 < layers) g = relu_backward(g, c.pre[l]);
      params_[l].accumulate(matmul_at_b(c.propagated[l], g));
      if (l == 0) break;
      g = ops.gcn.apply(matmul_a_bt(g, params_[l].value));
      apply_mask(g, c.masks[l]);
    }
  }
};

// ---------------------------------------------------------------- GraphSAGE

class SageModel final : public NodeClassifier {
 public:
  SageModel(const GnnConfig& cfg, std::size_t in, std::size_t classes)
      : NodeClassifier({in}, classes, cfg.dropout) {
    Rng rng(cfg.seed);
    const auto w = layer_widths(in, cfg.hidden, cfg.layers, classes);
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      params_.emplace_back("sage.w_self" + std::to_string(l), glorot(w[l], w[l + 1], rng));
      params_.emplace_back("sage.w_neigh" + std::to_string(l), glorot(w[l], w[l + 1], rng));
    }
  }

  ModelKind kind() const noexcept override { return ModelKind::sage; }
  std::unique_ptr<NodeClassifier> clone() const override { return std::make_unique<SageModel>(*this); }

  struct Cache : ForwardCache {
    std::vector<Tensor> inputs, aggregated, masks, pre;
  };

  ForwardPass forward(const GraphOperators& ops, std::span<const Tensor* const> inputs, Rng* rng) const override {
    check_inputs(ops, inputs);
    auto cache = std::make_unique<Cache>();
    Tensor h = *inputs[0];
    const std::size_t layers = params_.size() / 2;
    for (std::size_t l = 0; l < layers; ++l) {
      Tensor mask;
      Tensor x = apply_dropout(h, dropout_, rng, mask);
      Tensor m = ops.mean.forward(x);
      Tensor z = add(matmul(x, params_[2 * l].value), matmul(m, params_[2 * l + 1].value));
      require_finite(z, "sage layer");
      h = l + 1 < layers ? relu(z) : z;
      cache->inputs.push_back(std::move(x));
      cache->aggregated.push_back(std::move(m));
      cache->masks.push_back(std::move(mask));
      cache->pre.push_back(std::move(z));
    }
    return {std::move(h), std::move(cache)};
  }

  void backward(const GraphOperators& ops, const ForwardPass& pass, const Tensor& grad_logits) override {
    const Cache& c = cache_of<Cache>(pass);
    const std::size_t layers = params_.size() / 2;
    Tensor g = grad_logits;
    for (std::size_t l = layers; l-- > 0;) {
      if (l + 1 < layers) g = relu_backward(g, c.pre[l]);
      params_[2 * l].accumulate(matmul_at_b(c.inputs[l], g));
      params_[2 * l + 1].accumulate(matmul_at_b(c.aggregated[l], g));
      if (l == 0) break;
      Tensor gx = matmul_a_bt(g, params_[2 * l].value);
      add_inplace(gx, ops.mean.backward(matmul_a_bt(g, params_[2 * l + 1].value)));
      apply_mask(gx, c.masks[l]);
      g = std::move(gx);
    }
  }
};

// ---------------------------------------------------------------- MMGCN-lite
// Per-modality GCN stacks (ReLU on every layer) -> per-modality linear
// projection -> sum -> linear classifier.

class MmgcnModel final : public NodeClassifier {
 public:
  MmgcnModel(const GnnConfig& cfg, std::span<const std::size_t> in, std::size_t classes)
      : NodeClassifier({in.begin(), in.end()}, classes, cfg.dropout), layers_(cfg.layers) {
    Rng rng(cfg.seed);
    for (std::size_t b = 0; b < 2; ++b) {
      std::size_t width = in[b];
      for (std::size_t l = 0; l < layers_; ++l) {
        params_.emplace_back(branch_name(b) + ".gcn.w" + std::to_string(l), glorot(width, cfg.hidden, rng));
        width = cfg.hidden;
      }
    }
    for (std::size_t b = 0; b < 2; ++b)
      params_.emplace_back(branch_name(b) + ".proj", glorot(cfg.hidden, cfg.hidden, rng));
    params_.emplace_back("classifier.w", glorot(cfg.hidden, classes, rng));
    params_.emplace_back("classifier.b", Tensor(1, classes));
  }

  ModelKind kind() const noexcept override { return ModelKind::mmgcn; }
  std::unique_ptr<NodeClassifier> clone() const override { return std::make_unique<MmgcnModel>(*this); }

  struct Cache : ForwardCache {
    std::vector<Tensor> propagated[2], masks[2], pre[2];
    Tensor reps[2];
    Tensor fused;
  };

  ForwardPass forward(const GraphOperators& ops, std::span<const Tensor* const> inputs, Rng* rng) const override {
    check_inputs(ops, inputs);
    auto cache = std::make_unique<Cache>();
    Tensor fused;
    for (std::size_t b = 0; b < 2; ++b) {
      Tensor h = *inputs[b];
      for (std::size_t l = 0; l < layers_; ++l) {
        Tensor mask;
        Tensor p = ops.gcn.apply(apply_dropout(h, dropout_, rng, mask));
        Tensor z = matmul(p, weight(b, l).value);
        h = relu(z);
        cache->propagated[b].push_back(std::move(p));
        cache->masks[b].push_back(std::move(mask));
        cache->pre[b].push_back(std::move(z));
      }
      Tensor q = matmul(h, proj(b).value);
      fused = b == 0 ? std::move(q) : add(fused, q);
      cache->reps[b] = std::move(h);
    }
    Tensor logits = linear_forward(fused, classifier_w().value, classifier_b().value);
    cache->fused = std::move(fused);
    return {std::move(logits), std::move(cache)};
  }

  void backward(const GraphOperators& ops, const ForwardPass& pass, const Tensor& grad_logits) override {
    const Cache& c = cache_of<Cache>(pass);
    LinearGrads head = linear_backward(c.fused, classifier_w().value, grad_logits);
    classifier_w().accumulate(head.weight);
    classifier_b().accumulate(head.bias);
    for (std::size_t b = 0; b < 2; ++b) {
      proj(b).accumulate(matmul_at_b(c.reps[b], head.input));
      Tensor g = matmul_a_bt(head.input, proj(b).value);
      for (std::size_t l = layers_; l-- > 0;) {
        g = relu_backward(g, c.pre[b][l]);
        weight(b, l).accumulate(matmul_at_b(c.propagated[b][l], g));
        if (l == 0) break;
        g = ops.gcn.apply(matmul_a_bt(g, weight(b, l).value));
        apply_mask(g, c.masks[b][l]);
      }
    }
  }

 private:
  static std::string branch_name(std::size_t b) { return b == 0 ? "text" : "image"; }
  Parameter& weight(std::size_t b, std::size_t l) { return params_[b * layers_ + l]; }
  const Parameter& weight(std::size_t b, std::size_t l) const { return params_[b * layers_ + l]; }
  Parameter& proj(std::size_t b) { return params_[2 * layers_ + b]; }
  const Parameter& proj(std::size_t b) const { return params_[2 * layers_ + b]; }
  Parameter& classifier_w() { return params_[2 * layers_ + 2]; }
  const Parameter& classifier_w() const { return params_[2 * layers_ + 2]; }
  Parameter& classifier_b() { return params_[2 * layers_ + 3]; }
  const Parameter& classifier_b() const { return params_[2 * layers_ + 3]; }

  std::size_t layers_;
};

// ---------------------------------------------------------------- MGAT-lite
// Per-modality attention layers h' = ReLU(H + Σ_u alpha_vu H_u), H = X·W,
// modalities mixed by a learned scalar gate sigmoid(gamma), then a linear classifier.

class MgatModel final : public NodeClassifier {
 public:
  MgatModel(const GnnConfig& cfg, std::span<const std::size_t> in, std::size_t classes)
      : NodeClassifier({in.begin(), in.end()}, classes, cfg.dropout), layers_(cfg.layers) {
    Rng rng(cfg.seed);
    for (std::size_t b = 0; b < 2; ++b) {
      std::size_t width = in[b];
      for (std::size_t l = 0; l < layers_; ++l) {
        const std::string prefix = std::string(b == 0 ? "text" : "image") + ".att" + std::to_string(l);
        params_.emplace_back(prefix + ".w", glorot(width, cfg.hidden, rng));
        params_.emplace_back(prefix + ".a_src", glorot(1, cfg.hidden, rng));
        params_.emplace_back(prefix + ".a_dst", glorot(1, cfg.hidden, rng));
        width = cfg.hidden;
      }
    }
    params_.emplace_back("gate", Tensor(1, 1));
    params_.emplace_back("classifier.w", glorot(cfg.hidden, classes, rng));
    params_.emplace_back("classifier.b", Tensor(1, classes));
  }

  ModelKind kind() const noexcept override { return ModelKind::mgat; }
  std::unique_ptr<NodeClassifier> clone() const override { return std::make_unique<MgatModel>(*this); }

  struct LayerCache {
    Tensor input, mask, hidden, pre;
    AttentionScores scores;
  };
  struct Cache : ForwardCache {
    std::vector<LayerCache> layers[2];
    Tensor reps[2];
    Tensor fused;
    double gate = 0.5;
  };

  ForwardPass forward(const GraphOperators& ops, std::span<const Tensor* const> inputs, Rng* rng) const override {
    check_inputs(ops, inputs);
    auto cache = std::make_unique<Cache>();
    for (std::size_t b = 0; b < 2; ++b) {
      Tensor h = *inputs[b];
      for (std::size_t l = 0; l < layers_; ++l) {
        LayerCache lc;
        lc.input = apply_dropout(h, dropout_, rng, lc.mask);
        lc.hidden = matmul(lc.input, w(b, l).value);
        lc.scores = attention_coefficients(lc.hidden, *ops.adjacency, a_src(b, l).value, a_dst(b, l).value);
        lc.pre = add(lc.hidden, attention_aggregate(lc.hidden, *ops.adjacency, lc.scores));
        require_finite(lc.pre, "attention layer");
        h = relu(lc.pre);
        cache->layers[b].push_back(std::move(lc));
      }
      cache->reps[b] = std::move(h);
    }
    const double g = 1.0 / (1.0 + std::exp(-static_cast<double>(gate().value(0, 0))));
    cache->gate = g;
    Tensor fused = scale(cache->reps[0], static_cast<float>(g));
    axpy_inplace(fused, static_cast<float>(1.0 - g), cache->reps[1]);
    Tensor logits = linear_forward(fused, classifier_w().value, classifier_b().value);
    cache->fused = std::move(fused);
    return {std::move(logits), std::move(cache)};
  }

  void backward(const GraphOperators& ops, const ForwardPass& pass, const Tensor& grad_logits) override {
    const Cache& c = cache_of<Cache>(pass);
    LinearGrads head = linear_backward(c.fused, classifier_w().value, grad_logits);
    classifier_w().accumulate(head.weight);
    classifier_b().accumulate(head.bias);

    const double g = c.gate;
    double dgate = 0.0;
    for (std::size_t i = 0; i < head.input.size(); ++i)
      dgate += static_cast<double>(head.input.values()[i]) * (c.reps[0].values()[i] - c.reps[1].values()[i]);
    Tensor dg(1, 1);
    dg(0, 0) = static_cast<float>(dgate * g * (1.0 - g));
    gate().accumulate(dg);

    for (std::size_t b = 0; b < 2; ++b) {
      Tensor grad = scale(head.input, static_cast<float>(b == 0 ? g : 1.0 - g));
      for (std::size_t l = layers_; l-- > 0;) {
        const LayerCache& lc = c.layers[b][l];
        grad = relu_backward(grad, lc.pre);
        Tensor dh = attention_backward(*ops.adjacency, lc, grad, b, l);
        w(b, l).accumulate(matmul_at_b(lc.input, dh));
        if (l == 0) break;
        grad = matmul_a_bt(dh, w(b, l).value);
        apply_mask(grad, lc.mask);
      }
    }
  }

 private:
  /// Gradient w.r.t. H of pre = H + attention_aggregate(H); accumulates the
  /// attention vectors' gradients.
  Tensor attention_backward(const Adjacency& adj, const LayerCache& lc, const Tensor& dpre, std::size_t b,
                            std::size_t l) {
    const Tensor& h = lc.hidden;
    const std::size_t n = h.rows(), d = h.cols();
    const auto offsets = adj.offsets();
    const auto indices = adj.indices();
    std::vector<double> dh(n * d);
    for (std::size_t i = 0; i < n * d; ++i) dh[i] = dpre.values()[i];
    std::vector<double> dsrc(n, 0.0), ddst(n, 0.0);
    std::vector<double> dalpha;
    for (NodeId v = 0; v < n; ++v) {
      const std::size_t begin = offsets[v], end = offsets[v + 1];
      if (begin == end) continue;
      const auto gv = dpre.row(v);
      dalpha.assign(end - begin, 0.0);
      double weighted = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const NodeId u = indices[k];
        const double a = lc.scores.alpha[k];
        const auto hu = h.row(u);
        for (std::size_t c = 0; c < d; ++c) dh[u * d + c] += a * gv[c];
        dalpha[k - begin] = dot(gv, hu);
        weighted += a * dalpha[k - begin];
      }
      for (std::size_t k = begin; k < end; ++k) {
        const double de = lc.scores.alpha[k] * (dalpha[k - begin] - weighted);
        const double dr = lc.scores.raw[k] > 0.0f ? de : de * kLeakySlope;
        dsrc[v] += dr;
        ddst[indices[k]] += dr;
      }
    }
    const auto asrc = a_src(b, l).value.row(0);
    const auto adst = a_dst(b, l).value.row(0);
    Tensor ga_src(1, d), ga_dst(1, d);
    std::vector<double> acc_src(d, 0.0), acc_dst(d, 0.0);
    for (NodeId v = 0; v < n; ++v) {
      const auto hv = h.row(v);
      for (std::size_t c = 0; c < d; ++c) {
        acc_src[c] += dsrc[v] * hv[c];
        acc_dst[c] += ddst[v] * hv[c];
        dh[v * d + c] += dsrc[v] * asrc[c] + ddst[v] * adst[c];
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      ga_src(0, c) = static_cast<float>(acc_src[c]);
      ga_dst(0, c) = static_cast<float>(acc_dst[c]);
    }
    a_src(b, l).accumulate(ga_src);
    a_dst(b, l).accumulate(ga_dst);
    Tensor out(n, d);
    for (std::size_t i = 0; i < n * d; ++i) out.values()[i] = static_cast<float>(dh[i]);
    return out;
  }

  std::size_t idx(std::size_t b, std::size_t l) const { return 3 * (b * layers_ + l); }
  Parameter& w(std::size_t b, std::size_t l) { return params_[idx(b, l)]; }
  const Parameter& w(std::size_t b, std::size_t l) const { return params_[idx(b, l)]; }
  Parameter& a_src(std::size_t b, std::size_t l) { return params_[idx(b, l) + 1]; }
  const Parameter& a_src(std::size_t b, std::size_t l) const { return params_[idx(b, l) + 1]; }
  Parameter& a_dst(std::size_t b, std::size_t l) { return params_[idx(b, l) + 2]; }
  const Parameter& a_dst(std::size_t b, std::size_t l) const { return params_[idx(b, l) + 2]; }
  Parameter& gate() { return params_[6 * layers_]; }
  const Parameter& gate() const { return params_[6 * layers_]; }
  Parameter& classifier_w() { return params_[6 * layers_ + 1]; }
  const Parameter& classifier_w() const { return params_[6 * layers_ + 1]; }
  Parameter& classifier_b() { return params_[6 * layers_ + 2]; }
  const Parameter& classifier_b() const { return params_[6 * layers_ + 2]; }

  std::size_t layers_;
};

}  // namespace

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::mlp: return "mlp";
    case ModelKind::gcn: return "gcn";
    case ModelKind::sage: return "sage";
    case ModelKind::mmgcn: return "mmgcn-lite";
    case ModelKind::mgat: return "mgat-lite";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "mlp") return ModelKind::mlp;
  if (name == "gcn") return ModelKind::gcn;
  if (name == "sage" || name == "graphsage") return ModelKind::sage;
  if (name == "mmgcn" || name == "mmgcn-lite") return ModelKind::mmgcn;
  if (name == "mgat" || name == "mgat-lite") return ModelKind::mgat;
  throw Error(Errc::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

bool is_multimodal(ModelKind kind) noexcept { return kind == ModelKind::mmgcn || kind == ModelKind::mgat; }

void GnnConfig::validate() const {
  if (layers < 1) throw Error(Errc::InvalidArgument, "GNN needs at least one layer");
  if (hidden < 1) throw Error(Errc::InvalidArgument, "hidden width must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(Errc::InvalidArgument, "dropout must lie in [0,1)");
  if (!(lr > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be positive");
}

std::vector<Parameter*> NodeClassifier::parameter_ptrs() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(&p);
  return out;
}

Parameter& NodeClassifier::param(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p;
  throw Error(Errc::InvalidArgument, "no parameter named '" + std::string(name) + "'");
}

void NodeClassifier::check_inputs(const GraphOperators& ops, std::span<const Tensor* const> inputs) const {
  const bool multimodal = is_multimodal(kind());
  if (inputs.size() != input_dims_.size()) {
    throw Error(multimodal ? Errc::ModalityUnavailable : Errc::ShapeMismatch,
                std::string(model_kind_name(kind())) + " expects " + std::to_string(input_dims_.size()) +
                    " input matrices, got " + std::to_string(inputs.size()));
  }
  const std::size_t n = ops.adjacency->num_nodes();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i]->rows() != n) {
      throw Error(multimodal ? Errc::ModalityUnavailable : Errc::ShapeMismatch,
                  "input " + std::to_string(i) + " has " + std::to_string(inputs[i]->rows()) + " rows for " +
                      std::to_string(n) + " nodes");
    }
    if (inputs[i]->cols() != input_dims_[i]) {
      throw Error(Errc::ShapeMismatch, "input " + std::to_string(i) + " width " +
                                           std::to_string(inputs[i]->cols()) + ", model trained on " +
                                           std::to_string(input_dims_[i]));
    }
  }
}

std::unique_ptr<NodeClassifier> make_model(const GnnConfig& cfg, std::span<const std::size_t> input_dims,
                                           std::size_t num_classes) {
  cfg.validate();
  if (num_classes < 1) throw Error(Errc::InvalidArgument, "need at least one class");
  if (is_multimodal(cfg.model)) {
    if (input_dims.size() != 2)
      throw Error(Errc::ModalityUnavailable, std::string(model_kind_name(cfg.model)) + " needs text and image inputs");
    return cfg.model == ModelKind::mmgcn ? std::unique_ptr<NodeClassifier>(new MmgcnModel(cfg, input_dims, num_classes))
                                         : std::unique_ptr<NodeClassifier>(new MgatModel(cfg, input_dims, num_classes));
  }
  if (input_dims.size() != 1)
    throw Error(Errc::ShapeMismatch, std::string(model_kind_name(cfg.model)) + " takes a single feature matrix");
  switch (cfg.model) {
    case ModelKind::mlp: return std::make_unique<MlpModel>(cfg, input_dims[0], num_classes);
    case ModelKind::gcn: return std::make_unique<GcnModel>(cfg, input_dims[0], num_classes);
    case ModelKind::sage: return std::make_unique<SageModel>(cfg, input_dims[0], num_classes);
    default: break;
  }
  throw Error(Errc::InvalidArgument, "unhandled model kind");
}

}  // namespace mmgl
