#include "sqr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sqr/error.hpp"

namespace sqr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2OverPi = 0.79788456080286535588;

// Huber-type profiles of the symmetric-kernel smoothing of |u|; each satisfies
// ℓ_h(u) = (h/2) profile(u/h) + (τ - 1/2) u.
double uniform_profile(double u) {
  const double a = std::abs(u);
  return a <= 1.0 ? 0.5 * u * u + 0.5 : a;
}

double gaussian_profile(double u) {
  return kSqrt2OverPi * std::exp(-0.5 * u * u) + u * (1.0 - 2.0 * normal_cdf(-u));
}

double epanechnikov_profile(double u) {
  const double a = std::abs(u);
  if (a > 1.0) return a;
  const double u2 = u * u;
  return 0.75 * u2 - 0.125 * u2 * u2 + 0.375;
}

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

std::string_view to_string(KernelId kernel) noexcept {
  switch (kernel) {
    case KernelId::Uniform: return "uniform";
    case KernelId::Gaussian: return "gaussian";
    case KernelId::Laplacian: return "laplacian";
    case KernelId::Logistic: return "logistic";
    case KernelId::Epanechnikov: return "epanechnikov";
  }
  return "unknown";
}

std::optional<KernelId> parse_kernel(std::string_view name) noexcept {
  for (KernelId k : kAllKernels) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void SmoothSpec::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(Errc::InvalidArgument, "tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(Errc::InvalidArgument, "bandwidth h must be > 0, got " + std::to_string(h));
  }
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double kernel_density(KernelId kernel, double u) noexcept {
  switch (kernel) {
    case KernelId::Uniform:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    case KernelId::Gaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelId::Laplacian:
      return 0.5 * std::exp(-std::abs(u));
    case KernelId::Logistic: {
      const double e = std::exp(-std::abs(u));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case KernelId::Epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

double kernel_cdf(KernelId kernel, double u) noexcept {
  switch (kernel) {
    case KernelId::Uniform:
      return std::clamp(0.5 * (u + 1.0), 0.0, 1.0);
    case KernelId::Gaussian:
      return normal_cdf(u);
    case KernelId::Laplacian:
      return u < 0.0 ? 0.5 * std::exp(u) : 1.0 - 0.5 * std::exp(-u);
    case KernelId::Logistic:
      if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
      else {
        const double e = std::exp(u);
        return e / (1.0 + e);
      }
    case KernelId::Epanechnikov: {
      if (u <= -1.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return std::clamp(0.5 + 0.75 * u - 0.25 * u * u * u, 0.0, 1.0);
    }
  }
  return 0.0;
}

double check_loss(double tau, double u) noexcept { return u * (tau - (u < 0.0 ? 1.0 : 0.0)); }

double smoothed_loss(const SmoothSpec& spec, double u) noexcept {
  const double h = spec.h;
  const double tau = spec.tau;
  const double z = u / h;
  switch (spec.kernel) {
    case KernelId::Uniform:
      return 0.5 * h * uniform_profile(z) + (tau - 0.5) * u;
    case KernelId::Gaussian:
      return 0.5 * h * gaussian_profile(z) + (tau - 0.5) * u;
    case KernelId::Laplacian:
      return check_loss(tau, u) + 0.5 * h * std::exp(-std::abs(z));
    case KernelId::Logistic:
      // τu + h log(1 + e^{-u/h}); softplus keeps both tails finite.
      return tau * u + h * softplus(-z);
    case KernelId::Epanechnikov:
      return 0.5 * h * epanechnikov_profile(z) + (tau - 0.5) * u;
  }
  return 0.0;
}

double smoothed_loss_derivative(const SmoothSpec& spec, double u) noexcept {
  return spec.tau - kernel_cdf(spec.kernel, -u / spec.h);
}

double smoothed_loss_curvature(const SmoothSpec& spec, double u) noexcept {
  return kernel_density(spec.kernel, u / spec.h) / spec.h;
}

}  // namespace sqr
