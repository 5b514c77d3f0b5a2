#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

Mat to_mat(const mmgl::Tensor& t) {
  Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

mmgl::Tensor random_tensor(std::size_t rows, std::size_t cols, mmgl::Rng& rng, double scale) {
  mmgl::Tensor t(rows, cols);
  for (auto& v : t.values()) v = static_cast<float>(scale * rng.uniform(-1.0, 1.0));
  return t;
}

double max_abs_diff(const mmgl::Tensor& t, const Mat& m) {
  double worst = 0.0;
  if (t.rows() != m.size()) return INFINITY;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (m[r].size() != t.cols()) return INFINITY;
    for (std::size_t c = 0; c < t.cols(); ++c) worst = std::max(worst, std::abs(t(r, c) - m[r][c]));
  }
  return worst;
}

Mat naive_matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Mat out(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < k; ++t) out[i][j] += a[i][t] * b[t][j];
  return out;
}

std::vector<Edge> random_edges(std::size_t n, double p, mmgl::Rng& rng, bool with_junk) {
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) edges.emplace_back(u, v);
  if (with_junk && n > 0) {
    const std::size_t extra = edges.size() / 4 + 1;
    for (std::size_t i = 0; i < extra; ++i) {
      const std::size_t u = rng.uniform_index(n);
      edges.emplace_back(u, u);
      if (!edges.empty()) {
        const auto e = edges[rng.uniform_index(edges.size())];
        edges.emplace_back(e.second, e.first);
      }
    }
  }
  return edges;
}

Mat dense_adjacency(std::size_t n, const std::vector<Edge>& edges) {
  Mat a(n, std::vector<double>(n, 0.0));
  for (auto [u, v] : edges)
    if (u != v) a[u][v] = a[v][u] = 1.0;
  return a;
}

Mat dense_gcn(const Mat& adj, const Mat& x, const Mat& w, bool relu) {
  const std::size_t n = adj.size();
  Mat a_hat = adj;
  for (std::size_t i = 0; i < n; ++i) a_hat[i][i] += 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) deg[i] = std::accumulate(a_hat[i].begin(), a_hat[i].end(), 0.0);
  Mat norm(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) norm[i][j] = a_hat[i][j] / std::sqrt(deg[i] * deg[j]);
  Mat out = naive_matmul(naive_matmul(norm, x), w);
  if (relu)
    for (auto& row : out)
      for (auto& v : row) v = std::max(0.0, v);
  return out;
}

Mat loop_sage(const Mat& adj, const Mat& x, const Mat& ws, const Mat& wn, bool relu) {
  const std::size_t n = adj.size(), d = x.empty() ? 0 : x[0].size();
  Mat out(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<double> agg(d, 0.0);
    double count = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (adj[v][u] == 0.0) continue;
      count += 1.0;
      for (std::size_t c = 0; c < d; ++c) agg[c] += x[u][c];
    }
    if (count > 0)
      for (auto& a : agg) a /= count;
    const auto self = naive_matmul({x[v]}, ws)[0];
    const auto neigh = naive_matmul({agg}, wn)[0];
    out[v].resize(self.size());
    for (std::size_t c = 0; c < self.size(); ++c) {
      const double h = self[c] + neigh[c];
      out[v][c] = relu ? std::max(0.0, h) : h;
    }
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double structure_loss(const Mat& anchors, const Mat& positives, double tau) {
  const std::size_t b = anchors.size();
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double num = std::exp(cosine(anchors[i], positives[i]) / tau);
    double den = 0.0;
    for (std::size_t k = 0; k < b; ++k) den += std::exp(cosine(anchors[i], anchors[k]) / tau);
    total += -std::log(num / den);
  }
  return total / static_cast<double>(b);
}

double clip_loss(const Mat& text, const Mat& image, double tau) {
  const std::size_t n = text.size();
  Mat s(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s[i][j] = cosine(text[i], image[j]) / tau;
  double rows = 0.0, cols = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double den_r = 0.0, den_c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      den_r += std::exp(s[i][j]);
      den_c += std::exp(s[j][i]);
    }
    rows += -std::log(std::exp(s[i][i]) / den_r);
    cols += -std::log(std::exp(s[i][i]) / den_c);
  }
  return 0.5 * (rows + cols) / static_cast<double>(n);
}

double softmax_ce(const Mat& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double den = 0.0;
    for (double z : logits[i]) den += std::exp(z);
    total += -std::log(std::exp(logits[i][static_cast<std::size_t>(labels[i])]) / den);
  }
  return total / static_cast<double>(logits.size());
}

std::vector<std::size_t> topk_bruteforce(const Mat& adj, const Mat& features, std::size_t v, std::size_t k,
                                         std::size_t hops) {
  const std::size_t n = adj.size();
  std::vector<bool> reach(n, false);
  reach[v] = true;
  for (std::size_t h = 0; h < hops; ++h) {
    std::vector<bool> next = reach;
    for (std::size_t a = 0; a < n; ++a)
      if (reach[a])
        for (std::size_t b = 0; b < n; ++b)
          if (adj[a][b] != 0.0) next[b] = true;
    reach = next;
  }
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t u = 0; u < n; ++u)
    if (u != v && reach[u]) scored.emplace_back(-cosine(features[v], features[u]), u);
  std::sort(scored.begin(), scored.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

namespace {

std::vector<double> central_differences(const std::function<double()>& loss, mmgl::Tensor& param, double step) {
  std::vector<double> out(param.size());
  for (std::size_t i = 0; i < param.size(); ++i) {
    float& x = param.values()[i];
    const float orig = x;
    x = static_cast<float>(orig + step);
    const double up_x = x;
    const double up = loss();
    x = static_cast<float>(orig - step);
    const double down_x = x;
    const double down = loss();
    x = orig;
    out[i] = (up - down) / (up_x - down_x);
  }
  return out;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff2 = 0.0, a2 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff2 += (a[i] - b[i]) * (a[i] - b[i]);
    a2 += a[i] * a[i];
    b2 += b[i] * b[i];
  }
  return std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(b2), 1e-6});
}

std::vector<double> as_vector(const mmgl::Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

double fd_relative_error(const std::function<double()>& loss, mmgl::Tensor& param, const mmgl::Tensor& analytic,
                         double step) {
  return relative_error(as_vector(analytic), central_differences(loss, param, step));
}

FdCheck fd_check(const std::function<double()>& loss, mmgl::Tensor& param, const mmgl::Tensor& analytic,
                 double step) {
  const auto coarse = central_differences(loss, param, step);
  const auto fine = central_differences(loss, param, step / 2);
  return {relative_error(as_vector(analytic), coarse), relative_error(coarse, fine) > 1e-3};
}

FdCheck fd_check(const std::function<double()>& loss, const std::vector<mmgl::Tensor*>& params,
                 const std::vector<mmgl::Tensor>& analytic, double step) {
  std::vector<double> an, coarse, fine;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto a = as_vector(analytic[i]);
    const auto c = central_differences(loss, *params[i], step);
    const auto f = central_differences(loss, *params[i], step / 2);
    an.insert(an.end(), a.begin(), a.end());
    coarse.insert(coarse.end(), c.begin(), c.end());
    fine.insert(fine.end(), f.begin(), f.end());
  }
  return {relative_error(an, coarse), relative_error(coarse, fine) > 1e-3};
}

}  // namespace oracle
