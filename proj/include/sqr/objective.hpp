#pragma once

#include <span>
#include <string>
#include <vector>

#include "sqr/kernels.hpp"
#include "sqr/matrix.hpp"
#include "sqr/penalties.hpp"

namespace sqr {

/// Design matrix (n x p) and response (n). When `intercept` is set, column 0
/// is identically one.
struct Dataset {
  Matrix x;
  Vector y;
  bool intercept = true;
  std::vector<std::string> names;  // one per column of x; may be empty

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t p() const noexcept { return x.cols(); }

  /// Shape, finiteness and intercept-column checks; throws DataError.
  void validate() const;
};

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows);
Dataset subset_cols(const Dataset& data, std::span<const std::size_t> cols);

struct FitResult {
  Vector beta;
  double objective = 0.0;  // smoothed loss + weighted ℓ1 at beta
  int n_iter = 0;
  bool converged = false;
  double kkt_inf = 0.0;
  // Number of coordinate updates skipped for an empty smoothing band.
  int degenerate_updates = 0;
};

// r = y - X beta
Vector residuals(const Dataset& data, std::span<const double> beta);

/// (1/n) Σ ℓ_h(y_i - x_i'β).
double smoothed_objective(const Dataset& data, const SmoothSpec& spec, std::span<const double> beta);

/// smoothed_objective + Σ λ_j |β_j|.
double penalized_objective(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                           std::span<const double> beta);

/// (1/n) Σ ρ_τ(y_i - x_i'β).
double check_objective(const Dataset& data, double tau, std::span<const double> beta);

/// (1/n) Σ {K̄(-r_i/h) - τ} x_i.
Vector gradient(const Dataset& data, const SmoothSpec& spec, std::span<const double> beta);

/// (1/n) Σ K_h(-r_i) x_i x_i'. Diagnostics only; solvers never form it.
Matrix hessian(const Dataset& data, const SmoothSpec& spec, std::span<const double> beta);

/// Infinity norm of the first-order stationarity violation of
/// Q̂_h(β) + ‖λ∘β‖₁.
double kkt_residual(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                    std::span<const double> beta);

/// Same, given a precomputed gradient.
double kkt_residual_from_gradient(std::span<const double> grad, std::span<const double> weights,
                                  std::span<const double> beta) noexcept;

/// Optional column standardization (off by default everywhere). Non-intercept
/// columns are centered and scaled to unit sample standard deviation.
struct Standardization {
  Vector center;
  Vector scale;

  Dataset apply(const Dataset& data) const;
  /// Maps coefficients fitted on the standardized design back to the original scale.
  Vector back_transform(std::span<const double> beta) const;
};

Standardization fit_standardization(const Dataset& data);

}  // namespace sqr
