#pragma once

#include "sqr/solver.hpp"

namespace sqr {

/// Root of τ - K̄(-r/h) + η + ρ(r - c) = 0 in r. The left side is strictly
/// increasing, and the root lies in [c - (τ+η)/ρ, c - (τ-1+η)/ρ]. Uniform
/// kernel: closed form. Others: Newton from c, safeguarded by bisection.
double r_update_root(const SmoothSpec& spec, double eta, double rho, double c);

/// ADMM on the split  min Σℓ_h(r_i) + n‖λ∘β‖₁  s.t.  r = y - Xβ, with scaled
/// dual u. The β-step is a weighted lasso solved by covariance-update
/// coordinate descent on the cached Gram matrix.
class AdmmSolver final : public WeightedL1Solver {
 public:
  AdmmSolver(const Dataset& data, const SmoothSpec& spec, AdmmConfig cfg = {});

  FitResult solve(std::span<const double> weights, std::span<const double> init) override;

  const Dataset& data() const noexcept override { return data_; }
  const SmoothSpec& spec() const noexcept override { return spec_; }

  /// ‖r - y + Xβ‖₂ at the end of the last solve.
  double primal_residual() const noexcept { return primal_residual_; }

 private:
  const Dataset& data_;
  SmoothSpec spec_;
  AdmmConfig cfg_;
  Matrix gram_;
  double primal_residual_ = 0.0;
};

FitResult solve_admm(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                     const AdmmConfig& cfg = {});

}  // namespace sqr
