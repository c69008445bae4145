#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel has a scalar
// reference implementation with strictly sequential summation; vector variants
// are selected at runtime when the CPU supports them.

#include <cstddef>
#include <span>

namespace sqr::simd {

enum class Isa { Scalar, Avx2 };

/// Aggregates over one design column restricted to the smoothing band of the
/// uniform kernel. With residuals r = y - X beta:
///   band  : |r_i| <= h     (the paper's C2)
///   upper : r_i <= -h      (x_i'beta - y_i >= h, where the integrated kernel is 1)
struct BandSums {
  double sum_x_band = 0.0;
  double sum_xx_band = 0.0;
  double sum_xr_band = 0.0;
  double sum_x_upper = 0.0;
};

const char* isa_name(Isa isa) noexcept;

/// Best ISA the running CPU supports among those compiled in.
Isa detect_isa() noexcept;

/// ISA currently used by the dispatching entry points.
Isa active_isa() noexcept;

/// Forces an ISA. Requests for an unavailable ISA fall back to Scalar.
/// Returns the ISA actually selected.
Isa set_isa(Isa isa) noexcept;

bool isa_available(Isa isa) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double sum(std::span<const double> a) noexcept;
double sum_squares(std::span<const double> a) noexcept;
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept;

// Explicit per-ISA entry points, used by the equivalence tests.
namespace scalar {
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double sum(std::span<const double> a) noexcept;
double sum_squares(std::span<const double> a) noexcept;
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double sum(std::span<const double> a) noexcept;
double sum_squares(std::span<const double> a) noexcept;
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept;
}  // namespace avx2

}  // namespace sqr::simd
