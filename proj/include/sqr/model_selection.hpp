#pragma once

#include <cstdint>
#include <vector>

#include "sqr/irw.hpp"

namespace sqr {

/// max{0.05, √(τ(1-τ)) (log p / n)^{1/4}}.
double default_bandwidth(std::size_t n, std::size_t p, double tau);

/// Intercept of the intercept-only smoothed fit, argmin_b Σ ℓ_h(y_i - b).
double intercept_only_fit(const Dataset& data, const SmoothSpec& spec);

/// Smallest λ at which every penalized slope of the ℓ1 fit is zero:
/// max over penalized j of |∇_j Q̂_h(β₀)| with β₀ the intercept-only fit.
double lambda_max(const Dataset& data, const SmoothSpec& spec, const std::vector<std::size_t>& unpenalized = {0});

/// `size` log-spaced values from λ_max down to min_ratio·λ_max.
Vector lambda_grid(const Dataset& data, const SmoothSpec& spec, int size = 50, double min_ratio = 0.01,
                   const std::vector<std::size_t>& unpenalized = {0});

/// Log-spaced descending grid between `top` and min_ratio·top.
Vector log_grid(double top, int size, double min_ratio);

/// Fold label per observation: a seeded shuffle of 0..n-1, dealt round-robin.
std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed);

struct CvOptions {
  PenaltySpec penalty;  // lambda is replaced by each grid value
  int n_stages = 3;
  int folds = 5;
  Vector grid;  // empty: lambda_grid(data, spec, grid_size, min_ratio)
  int grid_size = 50;
  double min_ratio = 0.01;
  std::uint64_t seed = 1;
  std::vector<int> fold_ids;  // overrides the seeded assignment when set
  SolverConfig solver = CdConfig{};
  int threads = 1;
  bool refit = true;
};

struct CVResult {
  Vector grid;
  Matrix fold_errors;  // folds x grid, mean held-out check loss; NaN where the fit failed
  Vector mean_error;   // NaN for λ with any failed cell
  std::vector<bool> valid;
  std::size_t selected_index = 0;
  double selected_lambda = 0.0;
  int stage = 0;  // pipeline stage the errors refer to
  IRWResult selected;
  FitResult selected_fit;
  int failed_cells = 0;
  int nonconverged_cells = 0;
  // Held-out errors of every stage ℓ = 1..n_stages; stage ℓ=1 is the ℓ1 path.
  std::vector<Matrix> stage_fold_errors;
};

/// K-fold cross-validation of the IRW pipeline over a descending λ grid with
/// warm starts along the grid. Validation error is the raw check loss.
CVResult cross_validate(const Dataset& data, const SmoothSpec& spec, const CvOptions& opts);

/// Re-selects λ from the errors of an earlier stage of the same run (stage 1
/// gives the ℓ1 fit) and refits that many stages on the full data.
CVResult select_stage(const CVResult& cv, const Dataset& data, const SmoothSpec& spec, const CvOptions& opts,
                      int stage);

/// Index of the smallest valid mean error; ties go to the larger λ (lower index).
std::size_t argmin_error(const Vector& mean_error, const std::vector<bool>& valid);

}  // namespace sqr
