#pragma once

#include <cmath>

#include "sqr/solver.hpp"

namespace sqr {

/// S(a, b) = sign(a) max(|a| - b, 0).
inline double soft_threshold(double a, double b) noexcept {
  const double m = std::abs(a) - b;
  if (m <= 0.0) return 0.0;
  return a > 0.0 ? m : -m;
}

/// Coordinate descent for the uniform kernel. Each coordinate takes the
/// closed-form soft-threshold step obtained by freezing band membership at
/// the current iterate, with step halving if that step would raise the
/// objective. A coordinate with no observation in its band is instead
/// minimized exactly along that coordinate and counted in degenerate_updates.
/// Sweeps are cyclic over 0..p-1.
class CdSolver final : public WeightedL1Solver {
 public:
  /// Throws Error(NonUniformKernel) unless spec.kernel is Uniform.
  CdSolver(const Dataset& data, const SmoothSpec& spec, CdConfig cfg = {});

  FitResult solve(std::span<const double> weights, std::span<const double> init) override;

  const Dataset& data() const noexcept override { return data_; }
  const SmoothSpec& spec() const noexcept override { return spec_; }

  /// Penalized objective after each completed sweep of the last solve.
  const Vector& sweep_objectives() const noexcept { return sweep_objectives_; }

 private:
  const Dataset& data_;
  SmoothSpec spec_;
  CdConfig cfg_;
  Vector col_sums_;
  Vector sweep_objectives_;
};

FitResult solve_cd(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                   const CdConfig& cfg = {});

}  // namespace sqr
