#include "mmgl/numerics/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "mmgl/error.hpp"

namespace mmgl {

Tensor::Tensor(std::size_t rows, std::size_t cols, float fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error(Errc::ShapeMismatch, "tensor " + std::to_string(rows) + "x" + std::to_string(cols) +
                                         " given " + std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0f;
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<float>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<float> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(Errc::ShapeMismatch, "ragged rows in Tensor::from_rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(values));
}

Tensor Tensor::row_vector(std::span<const float> values) {
  return Tensor(1, values.size(), std::vector<float>(values.begin(), values.end()));
}

void Tensor::fill(float value) { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(Errc::ShapeMismatch,
                std::string(what) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

void require_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) throw Error(Errc::NonFinite, std::string(what) + " produced NaN/Inf");
}

}  // namespace mmgl
