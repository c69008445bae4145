#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sqr {

enum class KernelId { Uniform, Gaussian, Laplacian, Logistic, Epanechnikov };

inline constexpr KernelId kAllKernels[] = {KernelId::Uniform, KernelId::Gaussian, KernelId::Laplacian,
                                           KernelId::Logistic, KernelId::Epanechnikov};

/// Lowercase identifier: "uniform", "gaussian", "laplacian", "logistic", "epanechnikov".
std::string_view to_string(KernelId kernel) noexcept;
std::optional<KernelId> parse_kernel(std::string_view name) noexcept;

/// Quantile level, bandwidth and kernel of the smoothed check loss.
struct SmoothSpec {
  double tau = 0.5;
  double h = 0.1;
  KernelId kernel = KernelId::Gaussian;

  /// Throws Error(InvalidArgument) unless 0 < tau < 1 and h > 0.
  void validate() const;
};

/// Kernel density K(u).
double kernel_density(KernelId kernel, double u) noexcept;

/// Integrated kernel K̄(u) = ∫_{-∞}^u K(t) dt.
double kernel_cdf(KernelId kernel, double u) noexcept;

/// Standard normal CDF, accurate to ~1e-16 absolute.
double normal_cdf(double x) noexcept;

/// ρ_τ(u) = u (τ - 1{u < 0}).
double check_loss(double tau, double u) noexcept;

/// Convolution-smoothed check loss ℓ_h(u) = (ρ_τ * K_h)(u), closed form per kernel.
double smoothed_loss(const SmoothSpec& spec, double u) noexcept;

/// ℓ_h'(u) = τ - K̄(-u/h).
double smoothed_loss_derivative(const SmoothSpec& spec, double u) noexcept;

/// ℓ_h''(u) = K_h(u) = K(u/h)/h.
double smoothed_loss_curvature(const SmoothSpec& spec, double u) noexcept;

}  // namespace sqr
