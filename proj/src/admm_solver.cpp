#include "sqr/admm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqr/cd_solver.hpp"
#include "sqr/error.hpp"
#include "sqr/model_selection.hpp"
#include "sqr/simd.hpp"

namespace sqr {

namespace {

constexpr int kMaxRootIterations = 200;

double uniform_root(double tau, double h, double eta, double rho, double c) {
  // f(r) = τ - K̄(-r/h) + η + ρ(r - c) is linear on each of r >= h, |r| <= h, r <= -h.
  if (tau + eta + rho * (h - c) <= 0.0) return c - (tau + eta) / rho;
  if (tau - 1.0 + eta + rho * (-h - c) >= 0.0) return c - (tau - 1.0 + eta) / rho;
  return (rho * c + 0.5 - tau - eta) / (rho + 0.5 / h);
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "ADMM rho must be > 0");
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "ADMM epsilon must be > 0");
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "ADMM max_iter must be >= 1");
  if (!(kkt_tolerance >= 0.0)) throw Error(Errc::InvalidArgument, "ADMM kkt_tolerance must be >= 0");
  if (!(inner.tolerance > 0.0) || inner.max_sweeps < 1) {
    throw Error(Errc::InvalidArgument, "ADMM inner solver needs tolerance > 0 and max_sweeps >= 1");
  }
}

double r_update_root(const SmoothSpec& spec, double eta, double rho, double c) {
  if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be > 0");
  const double tau = spec.tau;
  const double h = spec.h;
  if (spec.kernel == KernelId::Uniform) return uniform_root(tau, h, eta, rho, c);

  auto f = [&](double r) { return tau - kernel_cdf(spec.kernel, -r / h) + eta + rho * (r - c); };
  double lo = c - (tau + eta) / rho;
  double hi = c - (tau - 1.0 + eta) / rho;
  double r = std::clamp(c, lo, hi);
  for (int it = 0; it < kMaxRootIterations; ++it) {
    const double fr = f(r);
    if (fr == 0.0) return r;
    if (fr < 0.0) lo = r;
    else hi = r;
    if (std::abs(fr) <= 1e-13 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(r))) {
      return r;
    }
    const double slope = rho + kernel_density(spec.kernel, -r / h) / h;
    double next = r - fr / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  return r;
}

AdmmSolver::AdmmSolver(const Dataset& data, const SmoothSpec& spec, AdmmConfig cfg)
    : data_(data), spec_(spec), cfg_(std::move(cfg)) {
  spec_.validate();
  cfg_.validate();
  gram_ = gram(data_.x);
}

FitResult AdmmSolver::solve(std::span<const double> weights, std::span<const double> init) {
  const std::size_t n = data_.n();
  const std::size_t p = data_.p();
  if (weights.size() != p) throw Error(Errc::DimensionMismatch, "weights length differs from p");
  if (!init.empty() && init.size() != p) throw Error(Errc::DimensionMismatch, "init length differs from p");

  const double rho = cfg_.rho;
  const double nd = static_cast<double>(n);
  const std::span<const double> y = data_.y;

  FitResult out;
  out.beta.assign(p, 0.0);
  if (!init.empty()) {
    std::copy(init.begin(), init.end(), out.beta.begin());
  } else if (data_.intercept && weights[0] == 0.0) {
    out.beta[0] = intercept_only_fit(data_, spec_);
  }
  Vector& beta = out.beta;

  // Start feasible, with the dual that makes the r-step stationary at r = y - Xβ.
  Vector fit(n);
  multiply(data_.x, beta, fit);
  Vector r(n), u(n), c(n), v(n), xtv(p), gbeta(p), prev(p);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = y[i] - fit[i];
    u[i] = -smoothed_loss_derivative(spec_, r[i]) / rho;
  }
  multiply(gram_, beta, gbeta);

  // Per-coordinate inner thresholds n λ_j / (ρ G_jj).
  Vector thresh(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (gram_(j, j) > 0.0) thresh[j] = nd * weights[j] / (rho * gram_(j, j));
  }

  const double primal_tol = cfg_.epsilon * std::sqrt(nd);
  for (int it = 1; it <= cfg_.max_iter; ++it) {
    prev = beta;

    // β-step: weighted lasso on v = y - r - u.
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] - r[i] - u[i];
    multiply_transposed(data_.x, v, xtv);
    for (int sweep = 0; sweep < cfg_.inner.max_sweeps; ++sweep) {
      double max_change = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        const double gjj = gram_(j, j);
        if (gjj <= 0.0) continue;
        const double old = beta[j];
        const double updated = soft_threshold(old + (xtv[j] - gbeta[j]) / gjj, thresh[j]);
        const double d = updated - old;
        if (d == 0.0) continue;
        beta[j] = updated;
        simd::axpy(d, gram_.col(j), gbeta);
        max_change = std::max(max_change, std::abs(d));
      }
      if (max_change <= cfg_.inner.tolerance) break;
    }

    // r-step and dual update.
    multiply(data_.x, beta, fit);
    double primal = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = y[i] - fit[i];
      r[i] = r_update_root(spec_, rho * u[i], rho, c[i]);
      const double gap = r[i] - c[i];
      u[i] += gap;
      primal += gap * gap;
    }
    primal_residual_ = std::sqrt(primal);

    out.n_iter = it;
    if (primal_residual_ <= primal_tol) {
      if (std::sqrt(norm2_squared_diff(beta, prev)) <= cfg_.epsilon ||
          (cfg_.kkt_tolerance > 0.0 && it % kKktCheckInterval == 0 &&
           kkt_residual(data_, spec_, weights, beta) <= cfg_.kkt_tolerance)) {
        out.converged = true;
        break;
      }
    }
  }

  out.objective = penalized_objective(data_, spec_, weights, beta);
  out.kkt_inf = kkt_residual(data_, spec_, weights, beta);
  return out;
}

FitResult solve_admm(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                     const AdmmConfig& cfg) {
  AdmmSolver solver(data, spec, cfg);
  return solver.solve(weights, cfg.init);
}

std::unique_ptr<WeightedL1Solver> make_solver(const Dataset& data, const SmoothSpec& spec, const SolverConfig& cfg) {
  if (const auto* cd = std::get_if<CdConfig>(&cfg)) return std::make_unique<CdSolver>(data, spec, *cd);
  return std::make_unique<AdmmSolver>(data, spec, std::get<AdmmConfig>(cfg));
}

SolverConfig default_solver_config(KernelId kernel) {
  if (kernel == KernelId::Uniform) return CdConfig{};
  return AdmmConfig{};
}

}  // namespace sqr
