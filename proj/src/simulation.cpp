#include "sqr/simulation.hpp"

#include <algorithm>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sqr/cd_solver.hpp"
#include "sqr/error.hpp"
#include "sqr/parallel.hpp"
#include "sqr/simd.hpp"

namespace sqr {

namespace {

constexpr double kRho = 0.7;
constexpr double kStudentDof = 1.5;
constexpr double kMixtureWeight = 0.3;  // weight of the N(0, 25) component
constexpr double kMixtureSd = 5.0;

const double kSlopes[] = {1.8, 0, 1.6, 0, 1.4, 0, 1.2, 0, 1, 0, -1, 0, -1.2, 0, -1.4, 0, -1.6, 0, -1.8};

double mixture_cdf(double x) {
  return (1.0 - kMixtureWeight) * normal_cdf(x) + kMixtureWeight * normal_cdf(x / kMixtureSd);
}

Vector ls_lasso_path_fit(const Dataset& data, const Vector& col_norms, double lambda, const LsLassoConfig& cfg,
                         int& iterations, bool& converged) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const double nd = static_cast<double>(n);
  Vector beta(p, 0.0);
  if (!cfg.init.empty()) beta = cfg.init;
  Vector r = residuals(data, beta);
  converged = false;
  for (iterations = 1; iterations <= cfg.max_iter; ++iterations) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (col_norms[j] <= 0.0) continue;
      auto xj = data.x.col(j);
      const double z = beta[j] + simd::dot(xj, r) / col_norms[j];
      const double thr = (data.intercept && j == 0) ? 0.0 : nd * lambda / col_norms[j];
      const double updated = soft_threshold(z, thr);
      const double d = updated - beta[j];
      if (d == 0.0) continue;
      beta[j] = updated;
      simd::axpy(-d, xj, r);
      max_change = std::max(max_change, std::abs(d));
    }
    if (max_change <= cfg.tolerance) {
      converged = true;
      break;
    }
  }
  iterations = std::min(iterations, cfg.max_iter);
  return beta;
}

void summarize(MethodSummary& s) {
  std::vector<MetricsReport> ok;
  for (const auto& m : s.per_rep) {
    if (m) ok.push_back(*m);
  }
  s.failures = static_cast<int>(s.per_rep.size() - ok.size());
  if (ok.empty()) return;
  const double k = static_cast<double>(ok.size());
  auto stat = [&](auto get, double& mean, double& se) {
    double sum = 0.0;
    for (const auto& m : ok) sum += get(m);
    mean = sum / k;
    if (ok.size() < 2) {
      se = 0.0;
      return;
    }
    double ss = 0.0;
    for (const auto& m : ok) ss += (get(m) - mean) * (get(m) - mean);
    se = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  };
  double size_mean = 0.0, size_se = 0.0;
  stat([](const MetricsReport& m) { return m.tpr; }, s.mean.tpr, s.se.tpr);
  stat([](const MetricsReport& m) { return m.fpr; }, s.mean.fpr, s.se.fpr);
  stat([](const MetricsReport& m) { return m.sse; }, s.mean.sse, s.se.sse);
  stat([](const MetricsReport& m) { return static_cast<double>(m.model_size); }, size_mean, size_se);
  stat([](const MetricsReport& m) { return m.pred_error; }, s.mean.pred_error, s.se.pred_error);
  s.mean.model_size = static_cast<int>(std::lround(size_mean));
  s.se.model_size = static_cast<int>(std::lround(size_se));
}

double bench_bandwidth(const BenchOptions& opts) {
  return opts.bandwidth ? *opts.bandwidth
                        : default_bandwidth(opts.scenario.n, opts.scenario.p, opts.scenario.tau);
}

}  // namespace

std::string_view to_string(NoiseFamily noise) noexcept {
  switch (noise) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::StudentT: return "t1.5";
    case NoiseFamily::Cauchy: return "cauchy";
    case NoiseFamily::Mixture: return "mixture";
  }
  return "unknown";
}

std::optional<NoiseFamily> parse_noise(std::string_view name) noexcept {
  for (auto f : {NoiseFamily::Gaussian, NoiseFamily::StudentT, NoiseFamily::Cauchy, NoiseFamily::Mixture}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

double noise_quantile(NoiseFamily noise, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(Errc::InvalidArgument, "tau must lie in (0, 1)");
  if (tau == 0.5) return 0.0;
  switch (noise) {
    case NoiseFamily::Gaussian:
      return boost::math::quantile(boost::math::normal_distribution<>(0.0, 1.0), tau);
    case NoiseFamily::StudentT:
      return boost::math::quantile(boost::math::students_t_distribution<>(kStudentDof), tau);
    case NoiseFamily::Cauchy:
      return boost::math::quantile(boost::math::cauchy_distribution<>(0.0, 1.0), tau);
    case NoiseFamily::Mixture: {
      double lo = -100.0, hi = 100.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mixture_cdf(mid) < tau ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

Vector true_coefficients(std::size_t p) {
  if (p < std::size(kSlopes)) throw Error(Errc::InvalidArgument, "scenario needs p >= 19");
  Vector beta(p + 1, 0.0);
  std::copy(std::begin(kSlopes), std::end(kSlopes), beta.begin() + 1);
  return beta;
}

Vector reference_coefficients(const Scenario& scenario) {
  Vector beta = true_coefficients(scenario.p);
  beta[0] = noise_quantile(scenario.noise, scenario.tau);
  return beta;
}

std::vector<std::size_t> true_support(std::size_t p) {
  const Vector beta = true_coefficients(p);
  std::vector<std::size_t> s{0};
  for (std::size_t j = 1; j < beta.size(); ++j) {
    if (beta[j] != 0.0) s.push_back(j);
  }
  return s;
}

Vector sample_noise(NoiseFamily noise, std::size_t n, std::mt19937_64& rng) {
  Vector e(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (noise) {
    case NoiseFamily::Gaussian:
      for (auto& v : e) v = normal(rng);
      break;
    case NoiseFamily::StudentT: {
      std::gamma_distribution<double> gamma(kStudentDof / 2.0, 2.0 / kStudentDof);
      for (auto& v : e) {
        const double z = normal(rng);
        v = z / std::sqrt(gamma(rng));
      }
      break;
    }
    case NoiseFamily::Cauchy: {
      std::cauchy_distribution<double> cauchy(0.0, 1.0);
      for (auto& v : e) v = cauchy(rng);
      break;
    }
    case NoiseFamily::Mixture: {
      std::bernoulli_distribution heavy(kMixtureWeight);
      for (auto& v : e) {
        const bool wide = heavy(rng);
        v = (wide ? kMixtureSd : 1.0) * normal(rng);
      }
      break;
    }
  }
  return e;
}

Vector sample_noise(NoiseFamily noise, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_noise(noise, n, rng);
}

Generated generate(const Scenario& scenario, std::mt19937_64& rng) {
  const std::size_t n = scenario.n;
  const std::size_t p = scenario.p;
  Generated out;
  out.beta_star = true_coefficients(p);
  Dataset& d = out.data;
  d.x = Matrix(n, p + 1);
  d.y.assign(n, 0.0);
  d.intercept = true;
  d.names.push_back("intercept");
  for (std::size_t j = 1; j <= p; ++j) d.names.push_back("x" + std::to_string(j));

  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - kRho * kRho);
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    double z = normal(rng);
    d.x(i, 1) = z;
    for (std::size_t j = 2; j <= p; ++j) {
      z = kRho * z + innovation * normal(rng);
      d.x(i, j) = z;
    }
  }
  const Vector eps = sample_noise(scenario.noise, n, rng);
  multiply(d.x, out.beta_star, d.y);
  for (std::size_t i = 0; i < n; ++i) d.y[i] += eps[i];
  return out;
}

Generated generate(const Scenario& scenario) {
  std::mt19937_64 rng(scenario.seed);
  return generate(scenario, rng);
}

MetricsReport metrics(std::span<const double> beta_hat, std::span<const double> beta_star) {
  if (beta_hat.size() != beta_star.size()) throw Error(Errc::DimensionMismatch, "metrics: length mismatch");
  MetricsReport m;
  int true_total = 0, true_found = 0, null_total = 0, null_found = 0;
  for (std::size_t j = 1; j < beta_hat.size(); ++j) {
    const bool selected = beta_hat[j] != 0.0;
    if (beta_star[j] != 0.0) {
      ++true_total;
      true_found += selected;
    } else {
      ++null_total;
      null_found += selected;
    }
    m.model_size += selected;
  }
  m.tpr = true_total > 0 ? static_cast<double>(true_found) / true_total : 1.0;
  m.fpr = null_total > 0 ? static_cast<double>(null_found) / null_total : 0.0;
  m.sse = norm2_squared_diff(beta_hat, beta_star);
  return m;
}

double prediction_error(std::span<const double> beta_hat, const Dataset& test, double tau) {
  return check_objective(test, tau, beta_hat);
}

FitResult solve_ls_lasso(const Dataset& data, double lambda, const LsLassoConfig& cfg) {
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
  const std::size_t p = data.p();
  if (!cfg.init.empty() && cfg.init.size() != p) throw Error(Errc::DimensionMismatch, "init length differs from p");
  Vector col_norms(p);
  for (std::size_t j = 0; j < p; ++j) col_norms[j] = simd::sum_squares(data.x.col(j));

  FitResult out;
  out.beta = ls_lasso_path_fit(data, col_norms, lambda, cfg, out.n_iter, out.converged);

  const Vector r = residuals(data, out.beta);
  Vector g(p);
  multiply_transposed(data.x, r, g);
  const double nd = static_cast<double>(data.n());
  Vector w(p, lambda);
  if (data.intercept) w[0] = 0.0;
  double rss = 0.0;
  for (double v : r) rss += v * v;
  double pen = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    g[j] = -g[j] / nd;
    pen += w[j] * std::abs(out.beta[j]);
  }
  out.objective = rss / (2.0 * nd) + pen;
  out.kkt_inf = kkt_residual_from_gradient(g, w, out.beta);
  return out;
}

double ls_lambda_max(const Dataset& data) {
  const double nd = static_cast<double>(data.n());
  const double ybar = std::accumulate(data.y.begin(), data.y.end(), 0.0) / nd;
  Vector centered(data.y);
  for (double& v : centered) v -= data.intercept ? ybar : 0.0;
  double top = 0.0;
  for (std::size_t j = data.intercept ? 1 : 0; j < data.p(); ++j) {
    top = std::max(top, std::abs(simd::dot(data.x.col(j), centered)) / nd);
  }
  return top;
}

LsCvResult cross_validate_ls(const Dataset& data, int folds, int grid_size, double min_ratio, std::uint64_t seed) {
  const std::size_t n = data.n();
  const std::vector<int> ids = assign_folds(n, folds, seed);
  LsCvResult cv;
  cv.grid = log_grid(ls_lambda_max(data), grid_size, min_ratio);
  const std::size_t m = cv.grid.size();
  Matrix errors(static_cast<std::size_t>(folds), m, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (ids[i] == f ? test : train).push_back(i);
    const Dataset tr = subset_rows(data, train);
    const Dataset te = subset_rows(data, test);
    LsLassoConfig cfg;
    for (std::size_t k = 0; k < m; ++k) {
      const FitResult fit = solve_ls_lasso(tr, cv.grid[k], cfg);
      cfg.init = fit.beta;
      const Vector r = residuals(te, fit.beta);
      double mse = 0.0;
      for (double v : r) mse += v * v;
      errors(static_cast<std::size_t>(f), k) = mse / static_cast<double>(r.size());
    }
  }
  cv.mean_error.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (int f = 0; f < folds; ++f) cv.mean_error[k] += errors(static_cast<std::size_t>(f), k);
    cv.mean_error[k] /= folds;
  }
  cv.selected_index = argmin_error(cv.mean_error, std::vector<bool>(m, true));
  cv.selected_lambda = cv.grid[cv.selected_index];
  cv.selected_fit = solve_ls_lasso(data, cv.selected_lambda);
  return cv;
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::LsLasso: return "ls-lasso";
    case Method::SqrLassoUniform: return "sqr-lasso-uniform";
    case Method::SqrScadUniform: return "sqr-scad-uniform";
    case Method::SqrLassoGaussian: return "sqr-lasso-gaussian";
    case Method::SqrScadGaussian: return "sqr-scad-gaussian";
    case Method::OracleUniform: return "oracle-uniform";
    case Method::OracleGaussian: return "oracle-gaussian";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (auto m : {Method::LsLasso, Method::SqrLassoUniform, Method::SqrScadUniform, Method::SqrLassoGaussian,
                 Method::SqrScadGaussian, Method::OracleUniform, Method::OracleGaussian}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Method> default_methods() {
  return {Method::LsLasso,          Method::SqrLassoUniform, Method::SqrScadUniform,
          Method::SqrLassoGaussian, Method::SqrScadGaussian, Method::OracleGaussian};
}

const MethodSummary& BenchReport::get(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return m;
  }
  throw Error(Errc::InvalidArgument, "method " + std::string(to_string(method)) + " was not benchmarked");
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t rep) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (rep + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::optional<MetricsReport>> run_replication(const BenchOptions& opts, std::uint64_t seed) {
  const Scenario& sc = opts.scenario;
  std::mt19937_64 rng(seed);
  const Generated train = generate(sc, rng);
  Scenario test_sc = sc;
  test_sc.n = opts.test_size > 0 ? opts.test_size : sc.n;
  const Generated test = generate(test_sc, rng);
  const Vector reference = reference_coefficients(sc);
  const double h = bench_bandwidth(opts);

  auto has = [&](Method m) { return std::find(opts.methods.begin(), opts.methods.end(), m) != opts.methods.end(); };
  auto score = [&](const Vector& beta) {
    MetricsReport m = metrics(beta, reference);
    m.pred_error = prediction_error(beta, test.data, sc.tau);
    return m;
  };

  std::vector<std::optional<MetricsReport>> out(opts.methods.size());
  auto record = [&](Method m, const Vector& beta) {
    for (std::size_t k = 0; k < opts.methods.size(); ++k) {
      if (opts.methods[k] == m) out[k] = score(beta);
    }
  };

  if (has(Method::LsLasso)) {
    try {
      const LsCvResult cv = cross_validate_ls(train.data, opts.cv_folds, opts.grid_size, opts.min_ratio, seed ^ 0x5A5A);
      record(Method::LsLasso, cv.selected_fit.beta);
    } catch (const Error&) {
    }
  }

  struct KernelMethods {
    KernelId kernel;
    Method lasso, scad, oracle;
  };
  for (const KernelMethods km : {KernelMethods{KernelId::Uniform, Method::SqrLassoUniform, Method::SqrScadUniform,
                                               Method::OracleUniform},
                                 KernelMethods{KernelId::Gaussian, Method::SqrLassoGaussian, Method::SqrScadGaussian,
                                               Method::OracleGaussian}}) {
    const SmoothSpec spec{sc.tau, h, km.kernel};
    const SolverConfig solver = default_solver_config(km.kernel);
    if (has(km.lasso) || has(km.scad)) {
      try {
        CvOptions cvo;
        cvo.penalty = PenaltySpec::make(has(km.scad) ? PenaltyFamily::Scad : PenaltyFamily::L1, 1.0);
        cvo.n_stages = has(km.scad) ? opts.n_stages : 1;
        cvo.folds = opts.cv_folds;
        cvo.grid_size = opts.grid_size;
        cvo.min_ratio = opts.min_ratio;
        cvo.seed = seed ^ 0xA5A5;
        cvo.solver = solver;
        cvo.refit = has(km.scad);
        const CVResult cv = cross_validate(train.data, spec, cvo);
        if (has(km.scad)) record(km.scad, cv.selected_fit.beta);
        if (has(km.lasso)) {
          cvo.refit = true;
          const CVResult lasso = select_stage(cv, train.data, spec, cvo, 1);
          record(km.lasso, lasso.selected_fit.beta);
        }
      } catch (const Error&) {
      }
    }
    if (has(km.oracle)) {
      try {
        const auto support = true_support(sc.p);
        record(km.oracle, fit_oracle(train.data, spec, support, solver).beta);
      } catch (const Error&) {
      }
    }
  }
  return out;
}

BenchReport run_benchmark(const BenchOptions& opts) {
  if (opts.reps < 2) throw Error(Errc::InvalidArgument, "benchmark needs reps >= 2");
  if (opts.methods.empty()) throw Error(Errc::InvalidArgument, "benchmark needs at least one method");
  BenchReport report;
  report.options = opts;
  report.bandwidth = bench_bandwidth(opts);
  const auto reps = static_cast<std::size_t>(opts.reps);
  for (std::size_t r = 0; r < reps; ++r) report.rep_seeds.push_back(child_seed(opts.master_seed, r));

  std::vector<std::vector<std::optional<MetricsReport>>> results(reps);
  parallel_for(reps, opts.threads, [&](std::size_t r) { results[r] = run_replication(opts, report.rep_seeds[r]); });

  for (std::size_t k = 0; k < opts.methods.size(); ++k) {
    MethodSummary s;
    s.method = opts.methods[k];
    for (std::size_t r = 0; r < reps; ++r) s.per_rep.push_back(results[r][k]);
    summarize(s);
    if (s.failures * 10 > opts.reps) {
      throw Error(Errc::TooManyFailures, std::string(to_string(s.method)) + " failed on " +
                                             std::to_string(s.failures) + " of " + std::to_string(opts.reps) +
                                             " replications");
    }
    report.methods.push_back(std::move(s));
  }
  return report;
}

std::string format_table(const BenchReport& report) {
  std::string out =
      "method,reps,failures,tpr,tpr_se,fpr,fpr_se,sse,sse_se,model_size,pred_error,pred_error_se\n";
  char line[512];
  for (const auto& m : report.methods) {
    double size_mean = 0.0;
    int ok = 0;
    for (const auto& r : m.per_rep) {
      if (r) {
        size_mean += r->model_size;
        ++ok;
      }
    }
    if (ok > 0) size_mean /= ok;
    std::snprintf(line, sizeof line, "%s,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f,%.6f,%.6f\n",
                  std::string(to_string(m.method)).c_str(), report.options.reps, m.failures, m.mean.tpr, m.se.tpr,
                  m.mean.fpr, m.se.fpr, m.mean.sse, m.se.sse, size_mean, m.mean.pred_error, m.se.pred_error);
    out += line;
  }
  return out;
}

ImprovementReport run_improvement(const ImprovementOptions& opts) {
  if (opts.n_stages < 2) throw Error(Errc::InvalidArgument, "improvement needs at least 2 stages");
  if (opts.reps < 1) throw Error(Errc::InvalidArgument, "improvement needs reps >= 1");
  const Scenario& sc = opts.scenario;
  const double lambda = opts.lambda > 0.0
                            ? opts.lambda
                            : 0.5 * std::sqrt(std::log(static_cast<double>(sc.p)) / static_cast<double>(sc.n));
  const double h = opts.bandwidth ? *opts.bandwidth : default_bandwidth(sc.n, sc.p, sc.tau);
  const SmoothSpec spec{sc.tau, h, opts.kernel};
  const Vector reference = reference_coefficients(sc);

  const auto reps = static_cast<std::size_t>(opts.reps);
  std::vector<RelativeImprovement> curves(reps);
  parallel_for(reps, opts.threads, [&](std::size_t r) {
    Scenario rep_sc = sc;
    rep_sc.seed = child_seed(opts.master_seed, r);
    const Generated g = generate(rep_sc);
    const IRWResult irw = fit_irw(g.data, spec, PenaltySpec::make(opts.penalty, lambda), opts.n_stages,
                                  default_solver_config(opts.kernel));
    curves[r] = relative_improvement(irw, reference);
  });

  ImprovementReport out;
  out.mean.assign(static_cast<std::size_t>(opts.n_stages - 1), 0.0);
  int used = 0;
  for (const auto& c : curves) {
    if (c.zero_denominator) {
      ++out.zero_denominator_reps;
      continue;
    }
    out.per_rep.push_back(c.values);
    for (std::size_t k = 0; k < c.values.size(); ++k) out.mean[k] += c.values[k];
    ++used;
  }
  if (used > 0) {
    for (double& v : out.mean) v /= used;
  }
  return out;
}

}  // namespace sqr
