#include <atomic>

#include "sqr/simd.hpp"

namespace sqr::simd {

#ifndef SQR_HAVE_AVX2
// Stubs so the explicit avx2:: entry points link on builds without AVX2; the
// dispatcher never selects them.
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b) noexcept { return scalar::dot(a, b); }
double sum(std::span<const double> a) noexcept { return scalar::sum(a); }
double sum_squares(std::span<const double> a) noexcept { return scalar::sum_squares(a); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept { scalar::axpy(alpha, x, y); }
BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept {
  return scalar::band_sums(x, r, h);
}
}  // namespace avx2
#endif

namespace {

struct Table {
  double (*dot)(std::span<const double>, std::span<const double>) noexcept;
  double (*sum)(std::span<const double>) noexcept;
  double (*sum_squares)(std::span<const double>) noexcept;
  void (*axpy)(double, std::span<const double>, std::span<double>) noexcept;
  BandSums (*band_sums)(std::span<const double>, std::span<const double>, double) noexcept;
};

constexpr Table kScalar{scalar::dot, scalar::sum, scalar::sum_squares, scalar::axpy, scalar::band_sums};
constexpr Table kAvx2{avx2::dot, avx2::sum, avx2::sum_squares, avx2::axpy, avx2::band_sums};

bool cpu_has_avx2() noexcept {
#if defined(SQR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Table*> g_table{nullptr};
std::atomic<Isa> g_isa{Isa::Scalar};

const Table& table() noexcept {
  const Table* t = g_table.load(std::memory_order_acquire);
  if (t == nullptr) {
    set_isa(detect_isa());
    t = g_table.load(std::memory_order_acquire);
  }
  return *t;
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa detect_isa() noexcept { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

Isa set_isa(Isa isa) noexcept {
  if (!isa_available(isa)) isa = Isa::Scalar;
  g_isa.store(isa, std::memory_order_release);
  g_table.store(isa == Isa::Avx2 ? &kAvx2 : &kScalar, std::memory_order_release);
  return isa;
}

Isa active_isa() noexcept {
  table();
  return g_isa.load(std::memory_order_acquire);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept { return table().dot(a, b); }
double sum(std::span<const double> a) noexcept { return table().sum(a); }
double sum_squares(std::span<const double> a) noexcept { return table().sum_squares(a); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept { table().axpy(alpha, x, y); }
BandSums band_sums(std::span<const double> x, std::span<const double> r, double h) noexcept {
  return table().band_sums(x, r, h);
}

}  // namespace sqr::simd
