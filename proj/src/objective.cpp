#include "sqr/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqr/error.hpp"
#include "sqr/simd.hpp"

namespace sqr {

namespace {

void require_dims(const Dataset& data, std::size_t len, const char* what) {
  if (len != data.p()) {
    throw Error(Errc::DimensionMismatch, std::string(what) + " has length " + std::to_string(len) +
                                             ", expected p = " + std::to_string(data.p()));
  }
}

}  // namespace

void Dataset::validate() const {
  if (y.size() != x.rows()) {
    throw DataError(Errc::DimensionMismatch, "response has " + std::to_string(y.size()) + " rows, design has " +
                                                 std::to_string(x.rows()));
  }
  if (n() < 2) throw DataError(Errc::InvalidArgument, "need at least 2 observations");
  if (p() < 1) throw DataError(Errc::InvalidArgument, "need at least 1 column");
  for (std::size_t i = 0; i < n(); ++i) {
    if (!std::isfinite(y[i])) throw DataError(Errc::NonNumericCell, "non-finite response at row " + std::to_string(i));
  }
  for (std::size_t j = 0; j < p(); ++j) {
    auto c = x.col(j);
    for (std::size_t i = 0; i < n(); ++i) {
      if (!std::isfinite(c[i])) {
        throw DataError(Errc::NonNumericCell,
                        "non-finite design entry at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
    }
  }
  if (intercept) {
    auto c = x.col(0);
    if (!std::all_of(c.begin(), c.end(), [](double v) { return v == 1.0; })) {
      throw DataError(Errc::InvalidArgument, "intercept column 0 must be all ones");
    }
  }
}

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.x = select_rows(data.x, rows);
  out.y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.y[i] = data.y[rows[i]];
  out.intercept = data.intercept;
  out.names = data.names;
  return out;
}

Dataset subset_cols(const Dataset& data, std::span<const std::size_t> cols) {
  Dataset out;
  out.x = select_cols(data.x, cols);
  out.y = data.y;
  out.intercept = data.intercept && !cols.empty() && cols[0] == 0;
  if (!data.names.empty()) {
    for (auto c : cols) out.names.push_back(data.names[c]);
  }
  return out;
}

Vector residuals(const Dataset& data, std::span<const double> beta) {
  require_dims(data, beta.size(), "beta");
  Vector fit(data.n());
  multiply(data.x, beta, fit);
  Vector r(data.n());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = data.y[i] - fit[i];
  return r;
}

double smoothed_objective(const Dataset& data, const SmoothSpec& spec, std::span<const double> beta) {
  const Vector r = residuals(data, beta);
  double s = 0.0;
  for (double ri : r) s += smoothed_loss(spec, ri);
  return s / static_cast<double>(data.n());
}

double penalized_objective(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                           std::span<const double> beta) {
  require_dims(data, weights.size(), "weights");
  double pen = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) pen += weights[j] * std::abs(beta[j]);
  return smoothed_objective(data, spec, beta) + pen;
}

double check_objective(const Dataset& data, double tau, std::span<const double> beta) {
  const Vector r = residuals(data, beta);
  double s = 0.0;
  for (double ri : r) s += check_loss(tau, ri);
  return s / static_cast<double>(data.n());
}

Vector gradient(const Dataset& data, const SmoothSpec& spec, std::span<const double> beta) {
  const Vector r = residuals(data, beta);
  Vector score(data.n());
  for (std::size_t i = 0; i < r.size(); ++i) score[i] = kernel_cdf(spec.kernel, -r[i] / spec.h) - spec.tau;
  Vector g(data.p());
  multiply_transposed(data.x, score, g);
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (double& v : g) v *= inv_n;
  return g;
}

Matrix hessian(const Dataset& data, const SmoothSpec& spec, std::span<const double> beta) {
  const Vector r = residuals(data, beta);
  const std::size_t p = data.p();
  const double inv_n = 1.0 / static_cast<double>(data.n());
  Matrix hess(p, p);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double w = smoothed_loss_curvature(spec, -r[i]) * inv_n;
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < p; ++j) {
      const double wj = w * data.x(i, j);
      for (std::size_t k = 0; k <= j; ++k) hess(j, k) += wj * data.x(i, k);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < j; ++k) hess(k, j) = hess(j, k);
  }
  return hess;
}

double kkt_residual_from_gradient(std::span<const double> grad, std::span<const double> weights,
                                  std::span<const double> beta) noexcept {
  double worst = 0.0;
  for (std::size_t j = 0; j < grad.size(); ++j) {
    double v;
    if (beta[j] != 0.0) {
      v = std::abs(grad[j] + weights[j] * (beta[j] > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(grad[j]) - weights[j]);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double kkt_residual(const Dataset& data, const SmoothSpec& spec, std::span<const double> weights,
                    std::span<const double> beta) {
  require_dims(data, weights.size(), "weights");
  const Vector g = gradient(data, spec, beta);
  return kkt_residual_from_gradient(g, weights, beta);
}

Standardization fit_standardization(const Dataset& data) {
  Standardization s;
  const std::size_t p = data.p();
  const double n = static_cast<double>(data.n());
  s.center.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (data.intercept && j == 0) continue;
    auto c = data.x.col(j);
    const double mean = simd::sum(c) / n;
    double ss = 0.0;
    for (double v : c) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    s.center[j] = mean;
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Dataset Standardization::apply(const Dataset& data) const {
  Dataset out = data;
  for (std::size_t j = 0; j < data.p(); ++j) {
    for (double& v : out.x.col(j)) v = (v - center[j]) / scale[j];
  }
  return out;
}

Vector Standardization::back_transform(std::span<const double> beta) const {
  Vector out(beta.begin(), beta.end());
  double shift = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = beta[j] / scale[j];
    shift += out[j] * center[j];
  }
  // Only meaningful with an intercept in column 0 (its center is 0).
  out[0] -= shift;
  return out;
}

}  // namespace sqr
