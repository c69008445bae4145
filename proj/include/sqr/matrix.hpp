#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sqr {

using Vector = std::vector<double>;

/// Dense column-major matrix. Columns are contiguous so the per-coordinate
/// solver loops can hand them straight to the simd kernels.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// out = X * beta; columns with beta_j == 0 are skipped.
void multiply(const Matrix& x, std::span<const double> beta, std::span<double> out);
// out = X' * v
void multiply_transposed(const Matrix& x, std::span<const double> v, std::span<double> out);
// X' X, symmetric p x p.
Matrix gram(const Matrix& x);
// Rows selected by index, in the given order.
Matrix select_rows(const Matrix& x, std::span<const std::size_t> rows);
Matrix select_cols(const Matrix& x, std::span<const std::size_t> cols);

double norm2_squared_diff(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace sqr
