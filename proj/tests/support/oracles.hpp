#pragma once

// Independent reference implementations used by the tests. Everything here
// works on plain nested vectors in double precision and never calls into the
// library's numerical code.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "mmgl/graph/graph.hpp"
#include "mmgl/numerics/random.hpp"
#include "mmgl/numerics/tensor.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Edge = std::pair<std::size_t, std::size_t>;

Mat to_mat(const mmgl::Tensor& t);
mmgl::Tensor random_tensor(std::size_t rows, std::size_t cols, mmgl::Rng& rng, double scale = 1.0);
/// Max absolute difference between a tensor and a reference matrix.
double max_abs_diff(const mmgl::Tensor& t, const Mat& m);

Mat naive_matmul(const Mat& a, const Mat& b);

/// Erdős–Rényi edge list on n nodes (u < v), optionally with junk entries
/// (self-loops, duplicates, reversed pairs) mixed in.
std::vector<Edge> random_edges(std::size_t n, double p, mmgl::Rng& rng, bool with_junk = false);
/// Dense symmetric 0/1 matrix without self-loops.
Mat dense_adjacency(std::size_t n, const std::vector<Edge>& edges);

/// D̃^{-1/2}(A+I)D̃^{-1/2} X W with optional ReLU, all dense.
Mat dense_gcn(const Mat& adj, const Mat& x, const Mat& w, bool relu);
/// Per-node loop: X_v·Ws + mean_{u∈N(v)} X_u · Wn.
Mat loop_sage(const Mat& adj, const Mat& x, const Mat& ws, const Mat& wn, bool relu);

double cosine(const std::vector<double>& a, const std::vector<double>& b);
/// Term-by-term structure contrastive loss.
double structure_loss(const Mat& anchors, const Mat& positives, double tau);
/// Symmetric InfoNCE by explicit enumeration of every pair.
double clip_loss(const Mat& text, const Mat& image, double tau);
/// Mean NLL of softmax by the direct formula (no log-sum-exp shift).
double softmax_ce(const Mat& logits, const std::vector<int>& labels);

/// Exhaustive ranking: all nodes within `hops` (by repeated dense expansion),
/// full sort by (−cosine, id), first k.
std::vector<std::size_t> topk_bruteforce(const Mat& adj, const Mat& features, std::size_t v, std::size_t k,
                                         std::size_t hops);

/// Norm-based relative error ‖g − g_fd‖ / max(‖g‖, ‖g_fd‖, floor) between an
/// analytic gradient and central differences of `loss` w.r.t. `param`.
double fd_relative_error(const std::function<double()>& loss, mmgl::Tensor& param, const mmgl::Tensor& analytic,
                         double step = 1e-3);

/// Central differences with step h and h/2. If the two estimates disagree the
/// loss is not smooth inside the window (a ReLU/LeakyReLU kink was crossed) and
/// the instance is unusable for a finite-difference check.
struct FdCheck {
  double error = 0.0;
  bool kink = false;
};
FdCheck fd_check(const std::function<double()>& loss, mmgl::Tensor& param, const mmgl::Tensor& analytic,
                 double step = 1e-3);
/// Same check over the concatenation of several parameter tensors.
FdCheck fd_check(const std::function<double()>& loss, const std::vector<mmgl::Tensor*>& params,
                 const std::vector<mmgl::Tensor>& analytic, double step = 1e-3);

}  // namespace oracle
