#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sqr/model_selection.hpp"

namespace sqr {

enum class NoiseFamily { Gaussian, StudentT, Cauchy, Mixture };

/// "gaussian", "t1.5", "cauchy", "mixture".
std::string_view to_string(NoiseFamily noise) noexcept;
std::optional<NoiseFamily> parse_noise(std::string_view name) noexcept;

/// τ-quantile of the noise law (0 at τ = 0.5 for all four).
double noise_quantile(NoiseFamily noise, double tau);

struct Scenario {
  std::size_t n = 500;
  std::size_t p = 400;  // slopes; the design gets an extra intercept column
  NoiseFamily noise = NoiseFamily::Gaussian;
  double tau = 0.5;
  std::uint64_t seed = 1;
};

/// (0, 1.8, 0, 1.6, 0, 1.4, 0, 1.2, 0, 1, 0, -1, 0, -1.2, 0, -1.4, 0, -1.6, 0, -1.8, 0, ...):
/// intercept first, then p slopes.
Vector true_coefficients(std::size_t p);

/// β* with the intercept shifted to the noise τ-quantile.
Vector reference_coefficients(const Scenario& scenario);

std::vector<std::size_t> true_support(std::size_t p);  // includes the intercept

struct Generated {
  Dataset data;
  Vector beta_star;
};

/// Rows x_i ~ N(0, Σ), Σ_jk = 0.7^{|j-k|}, by the AR(1) recursion; y = Xβ* + ε.
Generated generate(const Scenario& scenario);
Generated generate(const Scenario& scenario, std::mt19937_64& rng);

Vector sample_noise(NoiseFamily noise, std::size_t n, std::mt19937_64& rng);
Vector sample_noise(NoiseFamily noise, std::size_t n, std::uint64_t seed);

struct MetricsReport {
  double tpr = 0.0;
  double fpr = 0.0;
  double sse = 0.0;
  int model_size = 0;
  double pred_error = 0.0;
};

/// Support counts exclude the intercept (index 0); SSE covers every coordinate.
MetricsReport metrics(std::span<const double> beta_hat, std::span<const double> beta_star);

/// Mean check loss of y - Xβ̂ on the test rows.
double prediction_error(std::span<const double> beta_hat, const Dataset& test, double tau);

struct LsLassoConfig {
  double tolerance = 1e-10;  // max |Δβ_j| per sweep
  int max_iter = 100000;
  Vector init;
};

/// (1/2n)‖y - Xβ‖² + λ Σ_{j≥1} |β_j| by cyclic coordinate descent.
FitResult solve_ls_lasso(const Dataset& data, double lambda, const LsLassoConfig& cfg = {});

/// ‖X_{-0}'(y - ȳ)‖∞ / n.
double ls_lambda_max(const Dataset& data);

struct LsCvResult {
  Vector grid;
  Vector mean_error;  // held-out mean squared error
  std::size_t selected_index = 0;
  double selected_lambda = 0.0;
  FitResult selected_fit;
};

LsCvResult cross_validate_ls(const Dataset& data, int folds, int grid_size, double min_ratio, std::uint64_t seed);

/// Methods of the simulation tables.
enum class Method {
  LsLasso,
  SqrLassoUniform,
  SqrScadUniform,
  SqrLassoGaussian,
  SqrScadGaussian,
  OracleUniform,
  OracleGaussian,
};

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
std::vector<Method> default_methods();

struct BenchOptions {
  Scenario scenario;
  std::vector<Method> methods = default_methods();
  int reps = 20;
  std::uint64_t master_seed = 1;
  int cv_folds = 5;
  int grid_size = 50;
  double min_ratio = 0.05;  // CV grid floor; the lower end of a 0.01 grid is near-interpolating at n ≈ p
  std::optional<double> bandwidth;  // nullopt: default_bandwidth
  int n_stages = 3;
  int threads = 1;
  std::size_t test_size = 0;  // 0: same as n
};

struct MethodSummary {
  Method method{};
  std::vector<std::optional<MetricsReport>> per_rep;  // nullopt when that replication failed
  MetricsReport mean;
  MetricsReport se;  // sample sd / √(successful reps)
  int failures = 0;
};

struct BenchReport {
  BenchOptions options;
  double bandwidth = 0.0;
  std::vector<std::uint64_t> rep_seeds;
  std::vector<MethodSummary> methods;

  const MethodSummary& get(Method method) const;
};

/// Child seed of replication `rep`, a splitmix64 mix of (master, rep).
std::uint64_t child_seed(std::uint64_t master, std::uint64_t rep) noexcept;

/// Runs every method on one replication drawn from `seed`; nullopt marks a
/// method that failed on it.
std::vector<std::optional<MetricsReport>> run_replication(const BenchOptions& opts, std::uint64_t seed);

BenchReport run_benchmark(const BenchOptions& opts);

/// Comma-separated summary: one row per method with mean and se of each metric.
std::string format_table(const BenchReport& report);

struct ImprovementOptions {
  Scenario scenario;
  double lambda = 0.0;  // <= 0: 0.5 √(log p / n)
  KernelId kernel = KernelId::Uniform;
  std::optional<double> bandwidth;
  PenaltyFamily penalty = PenaltyFamily::Scad;
  int n_stages = 7;
  int reps = 20;
  std::uint64_t master_seed = 1;
  int threads = 1;
};

struct ImprovementReport {
  std::vector<std::vector<double>> per_rep;  // relative improvement for ℓ = 2..n_stages
  std::vector<double> mean;
  int zero_denominator_reps = 0;
};

/// Relative-improvement curves of the IRW path at a fixed λ, averaged over replications.
ImprovementReport run_improvement(const ImprovementOptions& opts);

}  // namespace sqr
