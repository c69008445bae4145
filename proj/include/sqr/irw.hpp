#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sqr/penalties.hpp"
#include "sqr/solver.hpp"

namespace sqr {

struct IrwOptions {
  int n_stages = 3;
  /// Warm start for the stage-1 solve only; the stage-1 weights always come
  /// from β̂^{(0)} = 0. Empty = zero.
  Vector stage1_init;
};

struct IRWResult {
  std::vector<FitResult> stages;              // solved stages, ℓ = 1..
  std::vector<WeightVector> weights_per_stage;  // weights used for stage ℓ; one extra entry on early exit
  std::vector<std::vector<std::size_t>> active_sets;
  std::optional<int> converged_at;  // 1-based stage whose weights repeated the previous stage's
  int requested_stages = 0;

  const FitResult& final_fit() const { return stages.back(); }
  /// β̂^{(ℓ)} for 1 <= ℓ <= requested_stages; stages past an early exit repeat the last fit.
  const Vector& beta_at(int stage) const;
  bool all_converged() const noexcept;
};

/// Iteratively reweighted ℓ1: λ^{(ℓ-1)}_j = q'_λ(|β̂^{(ℓ-1)}_j|) from β̂^{(0)} = 0,
/// each stage warm-started at the previous one. Stops early once a weight
/// vector repeats exactly.
IRWResult fit_irw(WeightedL1Solver& solver, const PenaltySpec& penalty, const IrwOptions& opts = {});

IRWResult fit_irw(const Dataset& data, const SmoothSpec& spec, const PenaltySpec& penalty, int n_stages,
                  const SolverConfig& solver);

/// Minimizer of Q̂_h over vectors supported on `support`, solved on the
/// reduced design and scattered back to length p.
FitResult fit_oracle(const Dataset& data, const SmoothSpec& spec, std::span<const std::size_t> support,
                     const SolverConfig& solver);

struct RelativeImprovement {
  std::vector<double> values;  // entry k is stage ℓ = k + 2
  bool zero_denominator = false;
};

/// (‖β̂^{(ℓ-1)} - β*‖² - ‖β̂^{(ℓ)} - β*‖²) / ‖β̂^{(1)} - β*‖² for ℓ = 2..requested_stages.
RelativeImprovement relative_improvement(const IRWResult& result, std::span<const double> beta_star);

std::vector<std::size_t> support_of(std::span<const double> beta);

}  // namespace sqr
