#pragma once

#include <memory>
#include <span>
#include <variant>

#include "sqr/objective.hpp"

namespace sqr {

inline constexpr int kKktCheckInterval = 10;

struct CdConfig {
  double epsilon = 1e-6;  // absolute, on ‖β^{(t)} - β^{(t-1)}‖₂ between full sweeps
  int max_iter = 5000;    // full sweeps
  // Also stop once the KKT residual (checked every kKktCheckInterval sweeps)
  // is at most this; 0 disables. Guards against slow drift along flat valleys.
  double kkt_tolerance = 1e-6;
  Vector init;  // empty: zero slopes, intercept at the intercept-only fit

  void validate() const;
};

struct InnerLassoConfig {
  double tolerance = 1e-8;  // max |Δβ_j| over one sweep
  int max_sweeps = 5;  // per outer iteration; warm starts carry progress across iterations
};

struct AdmmConfig {
  double rho = 1.0;
  double epsilon = 1e-6;
  int max_iter = 5000;  // outer iterations
  InnerLassoConfig inner;
  double kkt_tolerance = 1e-6;  // as in CdConfig, once the primal residual is within tolerance
  Vector init;  // empty: zero slopes, intercept at the intercept-only fit

  void validate() const;
};

using SolverConfig = std::variant<CdConfig, AdmmConfig>;

/// A solver for min_β Q̂_h(β) + ‖λ∘β‖₁ bound to one dataset and smoothing
/// spec, reusable across weight vectors and warm starts. The dataset must
/// outlive the solver.
class WeightedL1Solver {
 public:
  virtual ~WeightedL1Solver() = default;

  /// `init` empty means start from zero.
  virtual FitResult solve(std::span<const double> weights, std::span<const double> init) = 0;

  virtual const Dataset& data() const noexcept = 0;
  virtual const SmoothSpec& spec() const noexcept = 0;
};

/// CD for the uniform kernel, ADMM otherwise, unless the config says which.
std::unique_ptr<WeightedL1Solver> make_solver(const Dataset& data, const SmoothSpec& spec, const SolverConfig& cfg);

/// Default solver choice for a kernel: CD for uniform, ADMM for the rest.
SolverConfig default_solver_config(KernelId kernel);

}  // namespace sqr
