#include "sqr/matrix.hpp"

#include <algorithm>

#include "sqr/simd.hpp"

namespace sqr {

void multiply(const Matrix& x, std::span<const double> beta, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (beta[j] != 0.0) simd::axpy(beta[j], x.col(j), out);
  }
}

void multiply_transposed(const Matrix& x, std::span<const double> v, std::span<double> out) {
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] = simd::dot(x.col(j), v);
}

Matrix gram(const Matrix& x) {
  const std::size_t p = x.cols();
  Matrix g(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j; k < p; ++k) {
      const double v = simd::dot(x.col(j), x.col(k));
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

Matrix select_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto src = x.col(j);
    auto dst = out.col(j);
    for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = src[rows[i]];
  }
  return out;
}

Matrix select_cols(const Matrix& x, std::span<const std::size_t> cols) {
  Matrix out(x.rows(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    auto src = x.col(cols[k]);
    std::copy(src.begin(), src.end(), out.col(k).begin());
  }
  return out;
}

double norm2_squared_diff(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace sqr
