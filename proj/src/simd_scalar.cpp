#include "sqr/simd.hpp"

#include <cmath>

namespace sqr::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(std::span<const double> a) noexcept {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double sum_squares(std::span<const double> a) noexcept {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept {
  BandSums out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double ri = r[i];
    if (std::abs(ri) <= h) {
      out.sum_x_band += xi;
      out.sum_xx_band += xi * xi;
      out.sum_xr_band += xi * ri;
    } else if (ri < 0.0) {
      out.sum_x_upper += xi;
    }
  }
  return out;
}

}  // namespace sqr::simd::scalar
