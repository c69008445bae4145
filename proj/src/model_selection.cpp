#include "sqr/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "sqr/error.hpp"
#include "sqr/parallel.hpp"

namespace sqr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double heldout_check_loss(const Dataset& data, std::span<const std::size_t> rows, double tau,
                          std::span<const double> beta) {
  double s = 0.0;
  for (std::size_t i : rows) {
    double fit = 0.0;
    for (std::size_t j = 0; j < data.p(); ++j) {
      if (beta[j] != 0.0) fit += data.x(i, j) * beta[j];
    }
    s += check_loss(tau, data.y[i] - fit);
  }
  return s / static_cast<double>(rows.size());
}

void summarize(CVResult& cv, const Matrix& errors) {
  const std::size_t folds = errors.rows();
  const std::size_t m = errors.cols();
  cv.fold_errors = errors;
  cv.mean_error.assign(m, kNaN);
  cv.valid.assign(m, true);
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      if (std::isnan(errors(f, k))) cv.valid[k] = false;
      s += errors(f, k);
    }
    if (cv.valid[k]) cv.mean_error[k] = s / static_cast<double>(folds);
  }
}

void refit(CVResult& cv, const Dataset& data, const SmoothSpec& spec, const CvOptions& opts, int stages) {
  PenaltySpec pen = opts.penalty;
  pen.lambda = cv.selected_lambda;
  auto solver = make_solver(data, spec, opts.solver);
  IrwOptions irw;
  irw.n_stages = stages;
  cv.selected = fit_irw(*solver, pen, irw);
  cv.selected_fit = cv.selected.final_fit();
}

}  // namespace

double default_bandwidth(std::size_t n, std::size_t p, double tau) {
  if (n < 2 || p < 1) throw Error(Errc::InvalidArgument, "default bandwidth needs n >= 2 and p >= 1");
  const double rate = std::pow(std::log(static_cast<double>(p)) / static_cast<double>(n), 0.25);
  return std::max(0.05, std::sqrt(tau * (1.0 - tau)) * rate);
}

double intercept_only_fit(const Dataset& data, const SmoothSpec& spec) {
  // d/db Σ ℓ_h(y_i - b) = -Σ ℓ_h'(y_i - b) is nondecreasing in b; bisect on its sign.
  auto slope = [&](double b) {
    double s = 0.0;
    for (double yi : data.y) s -= smoothed_loss_derivative(spec, yi - b);
    return s;
  };
  const auto [ymin, ymax] = std::minmax_element(data.y.begin(), data.y.end());
  double width = std::max(spec.h, 1.0);
  double lo = *ymin - width;
  double hi = *ymax + width;
  while (slope(lo) > 0.0) lo -= (width *= 2.0);
  while (slope(hi) < 0.0) hi += (width *= 2.0);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = slope(mid);
    if (s == 0.0) return mid;
    if (s < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lambda_max(const Dataset& data, const SmoothSpec& spec, const std::vector<std::size_t>& unpenalized) {
  const std::size_t p = data.p();
  auto is_free = [&](std::size_t j) {
    return std::find(unpenalized.begin(), unpenalized.end(), j) != unpenalized.end();
  };
  bool any_penalized = false;
  for (std::size_t j = 0; j < p; ++j) any_penalized = any_penalized || !is_free(j);
  if (!any_penalized) throw Error(Errc::AllUnpenalized, "no penalized coordinates; the lambda grid is undefined");

  Vector beta0(p, 0.0);
  if (data.intercept) beta0[0] = intercept_only_fit(data, spec);
  const Vector g = gradient(data, spec, beta0);
  double top = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    if (!is_free(j)) top = std::max(top, std::abs(g[j]));
  }
  return top;
}

Vector log_grid(double top, int size, double min_ratio) {
  if (size < 2) throw Error(Errc::InvalidArgument, "grid size must be >= 2");
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw Error(Errc::InvalidArgument, "min_ratio must lie in (0, 1)");
  Vector grid(static_cast<std::size_t>(size));
  const double step = std::log(min_ratio) / static_cast<double>(size - 1);
  for (int k = 0; k < size; ++k) grid[static_cast<std::size_t>(k)] = top * std::exp(step * k);
  grid.back() = top * min_ratio;
  return grid;
}

Vector lambda_grid(const Dataset& data, const SmoothSpec& spec, int size, double min_ratio,
                   const std::vector<std::size_t>& unpenalized) {
  return log_grid(lambda_max(data, spec, unpenalized), size, min_ratio);
}

std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2 || static_cast<std::size_t>(folds) > n) {
    throw Error(Errc::InvalidArgument, "folds must satisfy 2 <= folds <= n");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  std::vector<int> ids(n);
  for (std::size_t m = 0; m < n; ++m) ids[perm[m]] = static_cast<int>(m % static_cast<std::size_t>(folds));
  return ids;
}

std::size_t argmin_error(const Vector& mean_error, const std::vector<bool>& valid) {
  std::size_t best = mean_error.size();
  for (std::size_t k = 0; k < mean_error.size(); ++k) {
    if (!valid[k]) continue;
    if (best == mean_error.size() || mean_error[k] < mean_error[best]) best = k;
  }
  if (best == mean_error.size()) throw Error(Errc::TooManyFailures, "every lambda in the grid failed");
  return best;
}

CVResult cross_validate(const Dataset& data, const SmoothSpec& spec, const CvOptions& opts) {
  spec.validate();
  if (opts.n_stages < 1) throw Error(Errc::InvalidArgument, "n_stages must be >= 1");
  const std::size_t n = data.n();

  std::vector<int> ids = opts.fold_ids;
  int folds = opts.folds;
  if (ids.empty()) {
    ids = assign_folds(n, folds, opts.seed);
  } else {
    if (ids.size() != n) throw Error(Errc::DimensionMismatch, "fold_ids length differs from n");
    folds = *std::max_element(ids.begin(), ids.end()) + 1;
  }

  CVResult cv;
  cv.grid = opts.grid.empty() ? lambda_grid(data, spec, opts.grid_size, opts.min_ratio, opts.penalty.unpenalized)
                              : opts.grid;
  for (std::size_t k = 1; k < cv.grid.size(); ++k) {
    if (!(cv.grid[k] < cv.grid[k - 1])) throw Error(Errc::InvalidArgument, "lambda grid must be strictly descending");
  }
  const std::size_t m = cv.grid.size();
  const auto stages = static_cast<std::size_t>(opts.n_stages);

  std::vector<Matrix> errors(stages, Matrix(static_cast<std::size_t>(folds), m, kNaN));
  std::vector<int> failed(static_cast<std::size_t>(folds), 0);
  std::vector<int> nonconverged(static_cast<std::size_t>(folds), 0);

  parallel_for(static_cast<std::size_t>(folds), opts.threads, [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (static_cast<std::size_t>(ids[i]) == f ? test : train).push_back(i);
    const Dataset train_data = subset_rows(data, train);
    auto solver = make_solver(train_data, spec, opts.solver);
    Vector warm;
    for (std::size_t k = 0; k < m; ++k) {
      PenaltySpec pen = opts.penalty;
      pen.lambda = cv.grid[k];
      IrwOptions irw;
      irw.n_stages = opts.n_stages;
      irw.stage1_init = warm;
      try {
        const IRWResult res = fit_irw(*solver, pen, irw);
        warm = res.stages.front().beta;
        for (std::size_t s = 0; s < stages; ++s) {
          errors[s](f, k) = heldout_check_loss(data, test, spec.tau, res.beta_at(static_cast<int>(s + 1)));
        }
        if (!res.all_converged()) ++nonconverged[f];
      } catch (const Error&) {
        ++failed[f];
      }
    }
  });

  cv.stage_fold_errors = std::move(errors);
  cv.failed_cells = std::accumulate(failed.begin(), failed.end(), 0);
  cv.nonconverged_cells = std::accumulate(nonconverged.begin(), nonconverged.end(), 0);
  cv.stage = opts.n_stages;
  summarize(cv, cv.stage_fold_errors.back());
  cv.selected_index = argmin_error(cv.mean_error, cv.valid);
  cv.selected_lambda = cv.grid[cv.selected_index];
  if (opts.refit) refit(cv, data, spec, opts, opts.n_stages);
  return cv;
}

CVResult select_stage(const CVResult& cv, const Dataset& data, const SmoothSpec& spec, const CvOptions& opts,
                      int stage) {
  if (stage < 1 || static_cast<std::size_t>(stage) > cv.stage_fold_errors.size()) {
    throw Error(Errc::InvalidArgument, "stage " + std::to_string(stage) + " was not cross-validated");
  }
  CVResult out;
  out.grid = cv.grid;
  out.stage_fold_errors = cv.stage_fold_errors;
  out.failed_cells = cv.failed_cells;
  out.nonconverged_cells = cv.nonconverged_cells;
  out.stage = stage;
  summarize(out, cv.stage_fold_errors[static_cast<std::size_t>(stage - 1)]);
  out.selected_index = argmin_error(out.mean_error, out.valid);
  out.selected_lambda = out.grid[out.selected_index];
  if (opts.refit) refit(out, data, spec, opts, stage);
  return out;
}

}  // namespace sqr
