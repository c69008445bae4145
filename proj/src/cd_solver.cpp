#include "sqr/cd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqr/error.hpp"
#include "sqr/model_selection.hpp"
#include "sqr/simd.hpp"

namespace sqr {

namespace {

constexpr int kMaxHalvings = 40;

// Uniform-kernel loss without the (τ - 1/2)u term, which is linear and
// handled separately: (h/2) U(u/h).
inline double uniform_even_part(double u, double h) {
  const double a = std::abs(u);
  return a <= h ? 0.25 * (u * u / h + h) : 0.5 * a;
}

// Change in Σ_i ℓ_h(r_i) when r moves to r - step * x.
double loss_change(double tau, double h, double col_sum, std::span<const double> x, std::span<const double> r,
                   double step) {
  double d = -(tau - 0.5) * step * col_sum;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    d += uniform_even_part(r[i] - step * xi, h) - uniform_even_part(r[i], h);
  }
  return d;
}

// Exact minimizer over t of Σ_i ℓ_h(r_i - t x_i) + lam_n |b + t| for the
// uniform kernel, by bisection on the (monotone) subgradient. Used when the
// band is empty and the curvature-based step is undefined.
double exact_coordinate_step(double tau, double h, std::span<const double> x, std::span<const double> r, double b,
                             double lam_n) {
  auto loss_slope = [&](double t) {
    double g = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (x[i] == 0.0) continue;
      const double u = r[i] - t * x[i];
      const double cdf = std::clamp((1.0 - u / h) / 2.0, 0.0, 1.0);  // K̄(-u/h)
      g -= x[i] * (tau - cdf);
    }
    return g;
  };
  const double kink = -b;
  const double at_kink = loss_slope(kink);
  if (at_kink - lam_n <= 0.0 && at_kink + lam_n >= 0.0) return kink;
  // The root lies on the side where the subgradient still has the wrong sign.
  const double dir = at_kink + lam_n < 0.0 ? 1.0 : -1.0;
  const double sgn = dir;  // sign of b + t on that side
  auto slope = [&](double t) { return loss_slope(t) + sgn * lam_n; };
  double near = kink;
  double width = std::max(1.0, std::abs(b));
  double far = kink + dir * width;
  for (int k = 0; k < 200 && dir * slope(far) < 0.0; ++k) {
    near = far;
    width *= 2.0;
    far = kink + dir * width;
  }
  double lo = std::min(near, far), hi = std::max(near, far);
  for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++k) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void CdConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "CD epsilon must be > 0");
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "CD max_iter must be >= 1");
  if (!(kkt_tolerance >= 0.0)) throw Error(Errc::InvalidArgument, "CD kkt_tolerance must be >= 0");
}

CdSolver::CdSolver(const Dataset& data, const SmoothSpec& spec, CdConfig cfg)
    : data_(data), spec_(spec), cfg_(std::move(cfg)) {
  spec_.validate();
  cfg_.validate();
  if (spec_.kernel != KernelId::Uniform) {
    throw Error(Errc::NonUniformKernel,
                "coordinate descent requires the uniform kernel, got " + std::string(to_string(spec_.kernel)));
  }
  col_sums_.resize(data_.p());
  for (std::size_t j = 0; j < data_.p(); ++j) col_sums_[j] = simd::sum(data_.x.col(j));
}

FitResult CdSolver::solve(std::span<const double> weights, std::span<const double> init) {
  const std::size_t n = data_.n();
  const std::size_t p = data_.p();
  if (weights.size() != p) throw Error(Errc::DimensionMismatch, "weights length differs from p");
  if (!init.empty() && init.size() != p) throw Error(Errc::DimensionMismatch, "init length differs from p");

  const double h = spec_.h;
  const double tau = spec_.tau;
  const double nd = static_cast<double>(n);

  FitResult out;
  out.beta.assign(p, 0.0);
  if (!init.empty()) {
    std::copy(init.begin(), init.end(), out.beta.begin());
  } else if (data_.intercept && weights[0] == 0.0) {
    out.beta[0] = intercept_only_fit(data_, spec_);
  }
  Vector& beta = out.beta;
  Vector r = residuals(data_, beta);
  Vector prev(p);
  sweep_objectives_.clear();

  for (int sweep = 1; sweep <= cfg_.max_iter; ++sweep) {
    prev = beta;
    std::size_t degenerate = 0;
    std::size_t moved_degenerate = 0;
    for (std::size_t j = 0; j < p; ++j) {
      auto xj = data_.x.col(j);
      const simd::BandSums bs = simd::band_sums(xj, r, h);
      if (bs.sum_xx_band <= 0.0) {
        ++degenerate;
        ++out.degenerate_updates;
        const double t = exact_coordinate_step(tau, h, xj, r, beta[j], nd * weights[j]);
        if (t != 0.0 && std::isfinite(t)) {
          beta[j] += t;
          simd::axpy(-t, xj, r);
          ++moved_degenerate;
        }
        continue;
      }
      const double curv = bs.sum_xx_band;
      const double num = 2.0 * h * tau * col_sums_[j] - 2.0 * h * bs.sum_x_upper - h * bs.sum_x_band + bs.sum_xr_band;
      const double old = beta[j];
      const double proposal = soft_threshold(old + num / curv, 2.0 * nd * h * weights[j] / curv);
      double step = proposal - old;
      if (step == 0.0) continue;

      // Backtrack until the coordinate objective does not increase.
      const double lam_n = nd * weights[j];
      bool accepted = false;
      for (int k = 0; k < kMaxHalvings; ++k) {
        const double delta = loss_change(tau, h, col_sums_[j], xj, r, step) + lam_n * (std::abs(old + step) - std::abs(old));
        if (delta <= 0.0) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) continue;
      beta[j] = old + step;
      simd::axpy(-step, xj, r);
    }
    if (degenerate == p && moved_degenerate == 0) {
      throw Error(Errc::DegenerateBand, "no observation falls inside the smoothing band for any coordinate "
                                        "(sweep " + std::to_string(sweep) + "); increase the bandwidth h");
    }
    double pen = 0.0;
    double loss = 0.0;
    for (std::size_t j = 0; j < p; ++j) pen += weights[j] * std::abs(beta[j]);
    for (double ri : r) loss += smoothed_loss(spec_, ri);
    sweep_objectives_.push_back(loss / nd + pen);

    out.n_iter = sweep;
    if (std::sqrt(norm2_squared_diff(beta, prev)) <= cfg_.epsilon) {
      out.converged = true;
      break;
    }
    if (cfg_.kkt_tolerance > 0.0 && sweep % kKktCheckInterval == 0 &&
        kkt_residual(data_, spec_, weights, beta) <= cfg_.kkt_tolerance) {
      out.converged = true;
      break;
    }
  }

  out.objective = penalized_objective(data_, spec_, weights, beta);
  out.kkt_inf = kkt_residual(data_, spec_, weights, beta);
  return out;
}

FitResult solve_cd(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                   const CdConfig& cfg) {
  CdSolver solver(data, spec, cfg);
  return solver.solve(weights, cfg.init);
}

}  // namespace sqr
