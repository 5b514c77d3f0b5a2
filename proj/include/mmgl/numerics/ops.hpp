#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmgl/numerics/tensor.hpp"

namespace mmgl {

// Dense products. All reductions accumulate in double.
Tensor matmul(const Tensor& a, const Tensor& b);
/// aᵀ·b without materializing the transpose.
Tensor matmul_at_b(const Tensor& a, const Tensor& b);
/// a·bᵀ without materializing the transpose.
Tensor matmul_a_bt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// Adds the 1×cols row `bias` to every row of `x` (the only broadcast supported).
Tensor add_row_bias(const Tensor& x, const Tensor& bias);
Tensor column_sums(const Tensor& x);
Tensor column_means(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
void add_inplace(Tensor& a, const Tensor& b);
void axpy_inplace(Tensor& a, float alpha, const Tensor& b);
Tensor scale(const Tensor& a, float s);

Tensor concat_cols(const Tensor& left, const Tensor& right);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);
/// out[rows[i]] += src[i]
void scatter_add_rows(Tensor& out, std::span<const std::size_t> rows, const Tensor& src);

Tensor relu(const Tensor& x);
/// Gradient through ReLU given the pre-activation.
Tensor relu_backward(const Tensor& grad, const Tensor& pre_activation);

/// y = x·W + b (b may be empty for a bias-free layer).
Tensor linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias);

struct LinearGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};
LinearGrads linear_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                            bool with_bias = true);

Tensor softmax_rows(const Tensor& logits);

struct LossAndGrad {
  double loss = 0.0;
  Tensor grad;
};

/// Mean NLL over all rows; grad = (softmax − onehot)/n.
LossAndGrad softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);
/// Mean NLL over the listed rows only; rows not listed get zero gradient.
/// `labels` is indexed by row of `logits`.
LossAndGrad softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                  std::span<const std::size_t> rows);

/// u·v/(‖u‖‖v‖); 0 if either norm is 0.
double cosine_similarity(std::span<const float> u, std::span<const float> v);
double dot(std::span<const float> u, std::span<const float> v);
double l2_norm(std::span<const float> v);
/// Unit-norm copy; a zero vector stays zero.
std::vector<float> l2_normalize(std::span<const float> v);

struct RowNormalized {
  Tensor normalized;
  std::vector<double> norms;
};
RowNormalized l2_normalize_rows(const Tensor& x);
/// Gradient of x ↦ x/‖x‖ per row; zero-norm rows receive zero gradient.
Tensor l2_normalize_rows_backward(const RowNormalized& forward, const Tensor& grad_out);

/// Index of the largest entry in each row; ties resolve to the lower index.
std::vector<int> argmax_rows(const Tensor& x);

}  // namespace mmgl
