#include "mmgl/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

void require(bool ok, const char* what, const Tensor& a, const Tensor& b) {
  if (!ok) {
    throw Error(Errc::ShapeMismatch,
                std::string(what) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul", a, b);
  Tensor out(a.rows(), b.cols());
  std::vector<double> acc(b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) acc[j] += aik * brow[j];
    }
    auto orow = out.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) orow[j] = static_cast<float>(acc[j]);
  }
  return out;
}

Tensor matmul_at_b(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(), "matmul_at_b", a, b);
  std::vector<double> acc(a.cols() * b.cols(), 0.0);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto arow = a.row(k);
    const auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* dst = acc.data() + i * b.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aki * brow[j];
    }
  }
  Tensor out(a.cols(), b.cols());
  for (std::size_t i = 0; i < acc.size(); ++i) out.values()[i] = static_cast<float>(acc[i]);
  return out;
}

Tensor matmul_a_bt(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.cols(), "matmul_a_bt", a, b);
  Tensor out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = static_cast<float>(dot(a.row(i), b.row(j)));
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  require(bias.rows() == 1 && bias.cols() == x.cols(), "add_row_bias", x, bias);
  Tensor out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias(0, j);
  }
  return out;
}

Tensor column_sums(const Tensor& x) {
  std::vector<double> acc(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc[j] += r[j];
  }
  Tensor out(1, x.cols());
  for (std::size_t j = 0; j < acc.size(); ++j) out(0, j) = static_cast<float>(acc[j]);
  return out;
}

Tensor column_means(const Tensor& x) {
  if (x.rows() == 0) throw Error(Errc::EmptyInput, "column mean of a matrix with no rows");
  std::vector<double> acc(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc[j] += r[j];
  }
  Tensor out(1, x.cols());
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < acc.size(); ++j) out(0, j) = static_cast<float>(acc[j] / n);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  add_inplace(out, b);
  return out;
}

void add_inplace(Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += bv[i];
}

void axpy_inplace(Tensor& a, float alpha, const Tensor& b) {
  require_same_shape(a, b, "axpy");
  auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += alpha * bv[i];
}

Tensor scale(const Tensor& a, float s) {
  Tensor out = a;
  for (auto& v : out.values()) v *= s;
  return out;
}

Tensor concat_cols(const Tensor& left, const Tensor& right) {
  require(left.rows() == right.rows(), "concat_cols", left, right);
  Tensor out(left.rows(), left.cols() + right.cols());
  for (std::size_t i = 0; i < left.rows(); ++i) {
    auto dst = out.row(i);
    std::copy(left.row(i).begin(), left.row(i).end(), dst.begin());
    std::copy(right.row(i).begin(), right.row(i).end(), dst.begin() + left.cols());
  }
  return out;
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin > end || end > x.cols()) {
    throw Error(Errc::ShapeMismatch, "slice_cols [" + std::to_string(begin) + "," +
                                         std::to_string(end) + ") of " + x.shape_string());
  }
  Tensor out(x.rows(), end - begin);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto src = x.row(i);
    std::copy(src.begin() + begin, src.begin() + end, out.row(i).begin());
  }
  return out;
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  Tensor out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= x.rows()) {
      throw Error(Errc::ShapeMismatch, "gather row " + std::to_string(rows[i]) + " of " +
                                           x.shape_string());
    }
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), out.row(i).begin());
  }
  return out;
}

void scatter_add_rows(Tensor& out, std::span<const std::size_t> rows, const Tensor& src) {
  if (src.rows() != rows.size() || src.cols() != out.cols()) {
    throw Error(Errc::ShapeMismatch, "scatter_add_rows " + src.shape_string() + " into " +
                                         out.shape_string());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto dst = out.row(rows[i]);
    const auto s = src.row(i);
    for (std::size_t j = 0; j < s.size(); ++j) dst[j] += s[j];
  }
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.values()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor relu_backward(const Tensor& grad, const Tensor& pre_activation) {
  require_same_shape(grad, pre_activation, "relu_backward");
  Tensor out = grad;
  auto g = out.values();
  const auto p = pre_activation.values();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (p[i] <= 0.0f) g[i] = 0.0f;
  return out;
}

Tensor linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  Tensor y = matmul(x, weight);
  if (!bias.empty()) y = add_row_bias(y, bias);
  require_finite(y, "linear_forward");
  return y;
}

LinearGrads linear_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                            bool with_bias) {
  require(grad_out.rows() == x.rows() && grad_out.cols() == weight.cols(), "linear_backward", x,
          grad_out);
  LinearGrads g;
  g.input = matmul_a_bt(grad_out, weight);
  g.weight = matmul_at_b(x, grad_out);
  if (with_bias) g.bias = column_sums(grad_out);
  return g;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto r = logits.row(i);
    const float mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (float v : r) z += std::exp(static_cast<double>(v) - mx);
    auto o = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j)
      o[j] = static_cast<float>(std::exp(static_cast<double>(r[j]) - mx) / z);
  }
  return out;
}

LossAndGrad softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  std::vector<std::size_t> rows(logits.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return softmax_cross_entropy(logits, labels, rows);
}

LossAndGrad softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                  std::span<const std::size_t> rows) {
  if (labels.size() != logits.rows()) {
    throw Error(Errc::ShapeMismatch, "softmax_cross_entropy: " + std::to_string(labels.size()) +
                                         " labels for " + logits.shape_string() + " logits");
  }
  if (rows.empty()) throw Error(Errc::EmptyInput, "softmax_cross_entropy over zero rows");
  const std::size_t classes = logits.cols();
  LossAndGrad out{0.0, Tensor(logits.rows(), classes)};
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double total = 0.0;
  for (std::size_t row : rows) {
    if (row >= logits.rows()) {
      throw Error(Errc::ShapeMismatch, "softmax_cross_entropy row " + std::to_string(row));
    }
    const int label = labels[row];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(label) + " not in [0," +
                                             std::to_string(classes) + ")");
    }
    const auto r = logits.row(row);
    double mx = -std::numeric_limits<double>::infinity();
    for (float v : r) mx = std::max(mx, static_cast<double>(v));
    double z = 0.0;
    for (float v : r) z += std::exp(static_cast<double>(v) - mx);
    const double log_z = mx + std::log(z);
    total += log_z - r[static_cast<std::size_t>(label)];
    auto g = out.grad.row(row);
    for (std::size_t j = 0; j < classes; ++j) {
      const double p = std::exp(static_cast<double>(r[j]) - log_z);
      g[j] = static_cast<float>((p - (j == static_cast<std::size_t>(label) ? 1.0 : 0.0)) * inv_n);
    }
  }
  out.loss = total * inv_n;
  if (!std::isfinite(out.loss)) throw Error(Errc::NonFinite, "softmax_cross_entropy loss");
  return out;
}

double dot(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw Error(Errc::ShapeMismatch,
                "dot of lengths " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<double>(u[i]) * v[i];
  return s;
}

double l2_norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  const double uv = dot(u, v);
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return uv / (nu * nv);
}

std::vector<float> l2_normalize(std::span<const float> v) {
  const double n = l2_norm(v);
  std::vector<float> out(v.begin(), v.end());
  if (n == 0.0) return out;
  for (auto& x : out) x = static_cast<float>(x / n);
  return out;
}

RowNormalized l2_normalize_rows(const Tensor& x) {
  RowNormalized out{Tensor(x.rows(), x.cols()), std::vector<double>(x.rows())};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double n = l2_norm(x.row(i));
    out.norms[i] = n;
    if (n == 0.0) continue;
    const auto src = x.row(i);
    auto dst = out.normalized.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = static_cast<float>(src[j] / n);
  }
  return out;
}

Tensor l2_normalize_rows_backward(const RowNormalized& forward, const Tensor& grad_out) {
  require_same_shape(forward.normalized, grad_out, "l2_normalize_rows_backward");
  Tensor out(grad_out.rows(), grad_out.cols());
  for (std::size_t i = 0; i < grad_out.rows(); ++i) {
    const double n = forward.norms[i];
    if (n == 0.0) continue;
    const auto y = forward.normalized.row(i);
    const auto g = grad_out.row(i);
    const double yg = dot(y, g);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < g.size(); ++j) dst[j] = static_cast<float>((g[j] - y[j] * yg) / n);
  }
  return out;
}

std::vector<int> argmax_rows(const Tensor& x) {
  std::vector<int> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.size(); ++j)
      if (r[j] > r[best]) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace mmgl
