#include "sqr/irw.hpp"

#include <algorithm>
#include <string>

#include "sqr/error.hpp"

namespace sqr {

std::vector<std::size_t> support_of(std::span<const double> beta) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) s.push_back(j);
  }
  return s;
}

const Vector& IRWResult::beta_at(int stage) const {
  if (stage < 1 || stage > std::max<int>(requested_stages, static_cast<int>(stages.size()))) {
    throw Error(Errc::InvalidArgument, "stage " + std::to_string(stage) + " out of range");
  }
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(stage), stages.size()) - 1;
  return stages[idx].beta;
}

bool IRWResult::all_converged() const noexcept {
  return std::all_of(stages.begin(), stages.end(), [](const FitResult& f) { return f.converged; });
}

IRWResult fit_irw(WeightedL1Solver& solver, const PenaltySpec& penalty, const IrwOptions& opts) {
  penalty.validate();
  if (opts.n_stages < 1) throw Error(Errc::InvalidArgument, "n_stages must be >= 1");
  const std::size_t p = solver.data().p();

  IRWResult out;
  out.requested_stages = opts.n_stages;
  Vector previous(p, 0.0);
  for (int stage = 1; stage <= opts.n_stages; ++stage) {
    WeightVector w = reweight(penalty, previous);
    if (stage > 1 && w == out.weights_per_stage.back()) {
      out.weights_per_stage.push_back(std::move(w));
      out.converged_at = stage;
      break;
    }
    std::span<const double> init = previous;
    if (stage == 1) init = opts.stage1_init;
    FitResult fit;
    try {
      fit = solver.solve(w, init);
    } catch (const Error& e) {
      throw Error(e.code(), "IRW stage " + std::to_string(stage) + ": " + e.what());
    }
    previous = fit.beta;
    out.active_sets.push_back(support_of(fit.beta));
    out.weights_per_stage.push_back(std::move(w));
    out.stages.push_back(std::move(fit));
  }
  return out;
}

IRWResult fit_irw(const Dataset& data, const SmoothSpec& spec, const PenaltySpec& penalty, int n_stages,
                  const SolverConfig& solver_cfg) {
  auto solver = make_solver(data, spec, solver_cfg);
  IrwOptions opts;
  opts.n_stages = n_stages;
  std::visit([&](const auto& c) { opts.stage1_init = c.init; }, solver_cfg);
  return fit_irw(*solver, penalty, opts);
}

FitResult fit_oracle(const Dataset& data, const SmoothSpec& spec, std::span<const std::size_t> support,
                     const SolverConfig& solver_cfg) {
  if (support.empty()) throw Error(Errc::EmptySupport, "oracle support is empty");
  std::vector<std::size_t> cols(support.begin(), support.end());
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  if (cols.back() >= data.p()) throw Error(Errc::DimensionMismatch, "oracle support index out of range");
  if (data.intercept && cols.front() != 0) {
    throw Error(Errc::InvalidArgument, "oracle support must include the intercept (index 0)");
  }

  const Dataset reduced = subset_cols(data, cols);
  SolverConfig cfg = solver_cfg;
  std::visit([](auto& c) { c.init.clear(); }, cfg);
  auto solver = make_solver(reduced, spec, cfg);
  const Vector zero_weights(cols.size(), 0.0);
  FitResult small = solver->solve(zero_weights, {});

  FitResult out = small;
  out.beta.assign(data.p(), 0.0);
  for (std::size_t k = 0; k < cols.size(); ++k) out.beta[cols[k]] = small.beta[k];
  return out;
}

RelativeImprovement relative_improvement(const IRWResult& result, std::span<const double> beta_star) {
  if (result.stages.empty()) throw Error(Errc::InvalidArgument, "relative improvement needs at least one stage");
  if (result.requested_stages < 2) throw Error(Errc::InvalidArgument, "relative improvement needs >= 2 stages");
  if (beta_star.size() != result.stages.front().beta.size()) {
    throw Error(Errc::DimensionMismatch, "beta_star length differs from the fitted coefficients");
  }
  RelativeImprovement out;
  const double base = norm2_squared_diff(result.beta_at(1), beta_star);
  if (base == 0.0) {
    out.zero_denominator = true;
    return out;
  }
  double prev = base;
  for (int stage = 2; stage <= result.requested_stages; ++stage) {
    const double cur = norm2_squared_diff(result.beta_at(stage), beta_star);
    out.values.push_back((prev - cur) / base);
    prev = cur;
  }
  return out;
}

}  // namespace sqr
