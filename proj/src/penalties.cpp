#include "sqr/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqr/error.hpp"

namespace sqr {

std::string_view to_string(PenaltyFamily family) noexcept {
  switch (family) {
    case PenaltyFamily::L1: return "l1";
    case PenaltyFamily::Scad: return "scad";
    case PenaltyFamily::Mcp: return "mcp";
    case PenaltyFamily::CappedL1: return "capped-l1";
  }
  return "unknown";
}

std::optional<PenaltyFamily> parse_penalty(std::string_view name) noexcept {
  for (auto f : {PenaltyFamily::L1, PenaltyFamily::Scad, PenaltyFamily::Mcp, PenaltyFamily::CappedL1}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

double default_concavity(PenaltyFamily family) noexcept {
  return family == PenaltyFamily::Scad ? 3.7 : 3.0;
}

PenaltySpec PenaltySpec::make(PenaltyFamily family, double lambda) {
  PenaltySpec spec;
  spec.family = family;
  spec.lambda = lambda;
  spec.a = default_concavity(family);
  return spec;
}

void PenaltySpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(Errc::InvalidArgument, "lambda must be > 0, got " + std::to_string(lambda));
  }
  if (family == PenaltyFamily::Scad && !(a > 2.0)) {
    throw Error(Errc::InvalidArgument, "SCAD requires a > 2, got " + std::to_string(a));
  }
  if ((family == PenaltyFamily::Mcp || family == PenaltyFamily::CappedL1) && !(a >= 1.0)) {
    throw Error(Errc::InvalidArgument, std::string(to_string(family)) + " requires a >= 1, got " + std::to_string(a));
  }
}

bool PenaltySpec::is_unpenalized(std::size_t j) const noexcept {
  return std::find(unpenalized.begin(), unpenalized.end(), j) != unpenalized.end();
}

double penalty_derivative(const PenaltySpec& spec, double t) {
  if (t < 0.0) throw Error(Errc::InvalidArgument, "penalty derivative needs t >= 0");
  const double lambda = spec.lambda;
  const double a = spec.a;
  switch (spec.family) {
    case PenaltyFamily::L1:
      return lambda;
    case PenaltyFamily::Scad:
      if (t <= lambda) return lambda;
      return std::max(a * lambda - t, 0.0) / (a - 1.0);
    case PenaltyFamily::Mcp:
      if (t >= a * lambda) return 0.0;
      return std::max(lambda - t / a, 0.0);
    case PenaltyFamily::CappedL1:
      // Closed at the breakpoint.
      return t <= 0.5 * a * lambda ? lambda : 0.0;
  }
  return lambda;
}

WeightVector reweight(const PenaltySpec& spec, std::span<const double> beta) {
  WeightVector w(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    w[j] = spec.is_unpenalized(j) ? 0.0 : penalty_derivative(spec, std::abs(beta[j]));
  }
  return w;
}

}  // namespace sqr
