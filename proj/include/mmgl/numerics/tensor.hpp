#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mmgl {

/// Dense row-major 2-D matrix of 32-bit reals.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, float fill = 0.0f);
  Tensor(std::size_t rows, std::size_t cols, std::vector<float> values);

  static Tensor identity(std::size_t n);
  static Tensor from_rows(std::initializer_list<std::initializer_list<float>> rows);
  static Tensor row_vector(std::span<const float> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  float& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  std::span<float> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const float> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  void fill(float value);
  bool all_finite() const noexcept;
  bool same_shape(const Tensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

/// Throws ShapeMismatch naming `what` unless the shapes agree.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);
/// Throws NonFinite naming `what` if any entry is NaN or infinite.
void require_finite(const Tensor& t, const char* what);

}  // namespace mmgl
