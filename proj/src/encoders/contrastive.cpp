#include "mmgl/encoders/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"

namespace mmgl {
namespace {

void check_inputs(const Tensor& a, const Tensor& b, double tau, const char* what) {
  require_same_shape(a, b, what);
  if (!(tau > 0.0)) throw Error(Errc::InvalidArgument, std::string(what) + ": tau must be positive");
  require_finite(a, what);
  require_finite(b, what);
}

double log_sum_exp(std::span<const double> xs) {
  const double mx = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

PairLoss clip_align_loss(const Tensor& text, const Tensor& image, double tau) {
  check_inputs(text, image, tau, "clip_align_loss");
  const std::size_t n = text.rows();
  if (n < 2) throw Error(Errc::DegenerateBatch, "clip_align_loss needs at least 2 pairs, got " + std::to_string(n));

  const RowNormalized t = l2_normalize_rows(text);
  const RowNormalized v = l2_normalize_rows(image);
  std::vector<double> logits(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) logits[i * n + j] = dot(t.normalized.row(i), v.normalized.row(j)) / tau;

  // dlogits accumulates ½·(P − I)/n from the row direction and ½·(Q − I)/n from columns.
  std::vector<double> dlogits(n * n, 0.0);
  double row_loss = 0.0;
  double col_loss = 0.0;
  std::vector<double> buf(n);
  const double w = 0.5 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) buf[j] = logits[i * n + j];
    const double lse = log_sum_exp(buf);
    row_loss += lse - logits[i * n + i];
    for (std::size_t j = 0; j < n; ++j) dlogits[i * n + j] += w * (std::exp(buf[j] - lse) - (i == j ? 1.0 : 0.0));
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = logits[i * n + j];
    const double lse = log_sum_exp(buf);
    col_loss += lse - logits[j * n + j];
    for (std::size_t i = 0; i < n; ++i) dlogits[i * n + j] += w * (std::exp(buf[i] - lse) - (i == j ? 1.0 : 0.0));
  }

  const std::size_t d = text.cols();
  std::vector<double> dt(n * d, 0.0);
  std::vector<double> dv(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double g = dlogits[i * n + j] / tau;
      if (g == 0.0) continue;
      const auto ti = t.normalized.row(i);
      const auto vj = v.normalized.row(j);
      for (std::size_t c = 0; c < d; ++c) {
        dt[i * d + c] += g * vj[c];
        dv[j * d + c] += g * ti[c];
      }
    }
  }
  Tensor gt(n, d);
  Tensor gv(n, d);
  for (std::size_t k = 0; k < n * d; ++k) {
    gt.values()[k] = static_cast<float>(dt[k]);
    gv.values()[k] = static_cast<float>(dv[k]);
  }

  PairLoss out;
  out.loss = 0.5 * (row_loss + col_loss) / static_cast<double>(n);
  out.grad_first = l2_normalize_rows_backward(t, gt);
  out.grad_second = l2_normalize_rows_backward(v, gv);
  if (!std::isfinite(out.loss)) throw Error(Errc::NonFinite, "clip_align_loss");
  return out;
}

PairLoss structure_contrastive_loss(const Tensor& anchors, const Tensor& positives, double tau) {
  check_inputs(anchors, positives, tau, "structure_contrastive_loss");
  const std::size_t b = anchors.rows();
  if (b == 0) throw Error(Errc::DegenerateBatch, "structure_contrastive_loss on an empty batch");

  const RowNormalized a = l2_normalize_rows(anchors);
  const RowNormalized p = l2_normalize_rows(positives);
  const std::size_t d = anchors.cols();
  const double scale = 1.0 / (static_cast<double>(b) * tau);

  std::vector<double> da(b * d, 0.0);
  std::vector<double> dp(b * d, 0.0);
  std::vector<double> row(b);
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const auto ai = a.normalized.row(i);
    const auto pi = p.normalized.row(i);
    const double pos = dot(ai, pi) / tau;
    for (std::size_t k = 0; k < b; ++k) row[k] = dot(ai, a.normalized.row(k)) / tau;
    const double lse = log_sum_exp(row);
    total += lse - pos;
    for (std::size_t c = 0; c < d; ++c) {
      da[i * d + c] -= scale * pi[c];
      dp[i * d + c] -= scale * ai[c];
    }
    for (std::size_t k = 0; k < b; ++k) {
      const double wk = std::exp(row[k] - lse) * scale;
      const auto ak = a.normalized.row(k);
      for (std::size_t c = 0; c < d; ++c) {
        da[i * d + c] += wk * ak[c];
        da[k * d + c] += wk * ai[c];
      }
    }
  }
  Tensor ga(b, d);
  Tensor gp(b, d);
  for (std::size_t k = 0; k < b * d; ++k) {
    ga.values()[k] = static_cast<float>(da[k]);
    gp.values()[k] = static_cast<float>(dp[k]);
  }
  PairLoss out;
  out.loss = total / static_cast<double>(b);
  out.grad_first = l2_normalize_rows_backward(a, ga);
  out.grad_second = l2_normalize_rows_backward(p, gp);
  if (!std::isfinite(out.loss)) throw Error(Errc::NonFinite, "structure_contrastive_loss");
  return out;
}

}  // namespace mmgl
