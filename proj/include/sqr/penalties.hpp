#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sqr/matrix.hpp"

namespace sqr {

enum class PenaltyFamily { L1, Scad, Mcp, CappedL1 };

/// "l1", "scad", "mcp", "capped-l1".
std::string_view to_string(PenaltyFamily family) noexcept;
std::optional<PenaltyFamily> parse_penalty(std::string_view name) noexcept;

/// Default concavity: 3.7 for SCAD, 3.0 for MCP and capped-ℓ1 (unused by ℓ1).
double default_concavity(PenaltyFamily family) noexcept;

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::L1;
  double lambda = 0.1;
  double a = 3.7;
  /// Coordinates whose weight is forced to zero; the intercept (0) by default.
  std::vector<std::size_t> unpenalized{0};

  static PenaltySpec make(PenaltyFamily family, double lambda);

  void validate() const;
  bool is_unpenalized(std::size_t j) const noexcept;
};

/// Per-coordinate ℓ1 weights λ_j of one reweighting stage.
using WeightVector = Vector;

/// q'_λ(t) for t >= 0; throws InvalidArgument on t < 0.
double penalty_derivative(const PenaltySpec& spec, double t);

/// λ_j = q'_λ(|β_j|) off the unpenalized set, 0 on it.
WeightVector reweight(const PenaltySpec& spec, std::span<const double> beta);

}  // namespace sqr
