#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the solver code under test except where a function says so.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sqr/kernels.hpp"
#include "sqr/objective.hpp"

namespace sqr::testing {

/// Kernel density written out independently of the library.
double reference_density(KernelId kernel, double t);

/// ∫ ρ_τ(u - h t) K(t) dt by adaptive Gauss–Kronrod quadrature, split at the kink.
double quadrature_smoothed_loss(KernelId kernel, double tau, double h, double u);

/// Central finite-difference gradient of f at x with step s_j = rel * max(1, |x_j|).
std::vector<double> finite_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                               std::span<const double> x, double rel = 1e-6);

/// Bisection root of an increasing function on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

/// Proximal-gradient (FISTA with restart) solve of smoothed loss + weighted ℓ1,
/// using only smoothed_loss_derivative and the kernel's density bound. Iterates
/// until the KKT residual is below `kkt_tol`.
Vector proximal_gradient_reference(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                                   double kkt_tol = 1e-11, int max_iter = 2000000);

/// Brute-force minimum of the weighted-ℓ1 smoothed objective over a cube of
/// half-width `radius` around `center`, refined by successive grid zooms.
Vector grid_search_minimum(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                           std::span<const double> center, double radius, int points = 21, int zooms = 12);

/// Exact (1/2n)‖y - Xβ‖² + λ‖β_{1:}‖₁ minimizer by enumerating active sets and
/// signs; feasible only for a handful of columns.
Vector enumerate_ls_lasso(const Dataset& data, double lambda);

/// Dataset with an intercept column and i.i.d. N(0,1) features;
/// y = X beta + noise_scale * N(0,1).
Dataset random_dataset(std::size_t n, std::size_t p_features, std::mt19937_64& rng, std::span<const double> beta = {},
                       double noise_scale = 1.0);

/// Solves the dense system A x = b (Gaussian elimination, partial pivoting).
Vector solve_dense(std::vector<std::vector<double>> a, Vector b);

}  // namespace sqr::testing
