#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sqr/error.hpp"
#include "sqr/irw.hpp"

using namespace sqr;

namespace {

// Returns a scripted sequence of coefficient vectors and records what it was asked.
class ScriptedSolver final : public WeightedL1Solver {
 public:
  ScriptedSolver(const Dataset& data, std::vector<Vector> script) : data_(data), script_(std::move(script)) {}

  FitResult solve(std::span<const double> weights, std::span<const double> init) override {
    weights_.emplace_back(weights.begin(), weights.end());
    inits_.emplace_back(init.begin(), init.end());
    FitResult f;
    f.beta = script_.at(std::min(calls_, script_.size() - 1));
    f.converged = true;
    ++calls_;
    return f;
  }
  const Dataset& data() const noexcept override { return data_; }
  const SmoothSpec& spec() const noexcept override { return spec_; }

  std::vector<Vector> weights_;
  std::vector<Vector> inits_;

 private:
  const Dataset& data_;
  SmoothSpec spec_{};
  std::vector<Vector> script_;
  std::size_t calls_ = 0;
};

Dataset tiny(std::size_t p_features) {
  std::mt19937_64 rng(1);
  return testing::random_dataset(10, p_features, rng);
}

}  // namespace

TEST_SUITE("irw") {
  TEST_CASE("stage weights follow the penalty derivative of the previous stage") {
    const auto d = tiny(3);
    ScriptedSolver solver(d, {{0.1, 2.0, 0.5, 0.0}, {0.2, 4.0, 0.3, 0.0}, {0.2, 4.0, 0.0, 0.0}});
    const auto pen = PenaltySpec::make(PenaltyFamily::Scad, 1.0);
    IrwOptions opts;
    opts.n_stages = 3;
    const auto res = fit_irw(solver, pen, opts);
    REQUIRE(solver.weights_.size() == 3);
    CHECK(solver.weights_[0] == Vector{0.0, 1.0, 1.0, 1.0});
    CHECK(solver.weights_[1][0] == 0.0);
    CHECK(solver.weights_[1][1] == doctest::Approx(1.7 / 2.7).epsilon(1e-15));
    CHECK(solver.weights_[1][2] == 1.0);
    CHECK(solver.weights_[1][3] == 1.0);
    CHECK(solver.weights_[2][1] == 0.0);
    CHECK(solver.inits_[0].empty());
    CHECK(solver.inits_[1] == Vector{0.1, 2.0, 0.5, 0.0});
    CHECK(res.stages.size() == 3);
    CHECK_FALSE(res.converged_at.has_value());
    CHECK(res.active_sets[2] == std::vector<std::size_t>{0, 1});
    CHECK(res.all_converged());
  }

  TEST_CASE("repeated weights end the loop early") {
    const auto d = tiny(2);
    ScriptedSolver solver(d, {{0.0, 5.0, 0.0}});
    const auto pen = PenaltySpec::make(PenaltyFamily::Scad, 1.0);
    IrwOptions opts;
    opts.n_stages = 5;
    const auto res = fit_irw(solver, pen, opts);
    // Stage 2 weights (0, 0, 1) differ from stage 1 (0, 1, 1); stage 3 repeats stage 2.
    CHECK(solver.weights_.size() == 2);
    CHECK(res.converged_at == 3);
    CHECK(res.weights_per_stage.size() == 3);
    CHECK(res.beta_at(5) == res.beta_at(2));
    CHECK_THROWS_AS(res.beta_at(6), Error);
    CHECK_THROWS_AS(res.beta_at(0), Error);
  }

  TEST_CASE("the l1 penalty stops after one stage") {
    const auto d = tiny(2);
    ScriptedSolver solver(d, {{0.3, 0.4, 0.0}});
    IrwOptions opts;
    opts.n_stages = 4;
    const auto res = fit_irw(solver, PenaltySpec::make(PenaltyFamily::L1, 0.2), opts);
    CHECK(res.stages.size() == 1);
    CHECK(res.converged_at == 2);
  }

  TEST_CASE("stage-one warm start is passed through") {
    const auto d = tiny(2);
    ScriptedSolver solver(d, {{0.3, 0.4, 0.0}});
    IrwOptions opts;
    opts.n_stages = 1;
    opts.stage1_init = {1.0, 1.0, 1.0};
    fit_irw(solver, PenaltySpec::make(PenaltyFamily::Scad, 0.2), opts);
    CHECK(solver.inits_[0] == Vector{1.0, 1.0, 1.0});
    CHECK(solver.weights_[0] == Vector{0.0, 0.2, 0.2});
  }

  TEST_CASE("relative improvement telescopes") {
    IRWResult r;
    r.requested_stages = 4;
    for (const Vector& b : {Vector{0.0, 2.0}, Vector{0.0, 1.5}, Vector{0.0, 1.2}}) {
      FitResult f;
      f.beta = b;
      r.stages.push_back(f);
    }
    const Vector star{0.0, 1.0};
    const auto ri = relative_improvement(r, star);
    REQUIRE(ri.values.size() == 3);
    CHECK(ri.values[0] == doctest::Approx(0.75));
    CHECK(ri.values[1] == doctest::Approx((0.25 - 0.04) / 1.0));
    CHECK(ri.values[2] == doctest::Approx(0.0));
    const auto exact = relative_improvement(r, Vector{0.0, 2.0});
    CHECK(exact.zero_denominator);
    CHECK(exact.values.empty());
  }

  TEST_CASE("oracle fit equals the unpenalized fit on the support") {
    std::mt19937_64 rng(50);
    const auto d = testing::random_dataset(80, 5, rng, Vector{1.0, 0.0, 2.0, 0.0, -1.0}, 1.0);
    const SmoothSpec spec{0.5, 0.4, KernelId::Gaussian};
    const std::vector<std::size_t> support{0, 2, 4};
    const auto fit = fit_oracle(d, spec, support, default_solver_config(KernelId::Gaussian));
    const auto reduced = subset_cols(d, support);
    const auto ref = testing::proximal_gradient_reference(reduced, spec, Vector(3, 0.0));
    CHECK(fit.beta.size() == 6);
    CHECK(fit.beta[1] == 0.0);
    CHECK(fit.beta[3] == 0.0);
    CHECK(fit.beta[5] == 0.0);
    for (std::size_t k = 0; k < 3; ++k) CHECK(fit.beta[support[k]] == doctest::Approx(ref[k]).epsilon(1e-4));
    CHECK_THROWS_AS(fit_oracle(d, spec, std::vector<std::size_t>{}, CdConfig{}), Error);
    CHECK_THROWS_AS(fit_oracle(d, spec, std::vector<std::size_t>{2}, AdmmConfig{}), Error);
  }

  TEST_CASE("end-to-end scad recovers a sparse signal") {
    std::mt19937_64 rng(51);
    Vector truth(21, 0.0);
    truth[1] = 2.0;
    truth[5] = -1.5;
    const auto d = testing::random_dataset(300, 20, rng, truth, 0.5);
    const SmoothSpec spec{0.5, 0.3, KernelId::Uniform};
    const auto res = fit_irw(d, spec, PenaltySpec::make(PenaltyFamily::Scad, 0.15), 3, CdConfig{});
    CHECK(res.all_converged());
    CHECK(support_of(res.final_fit().beta) == std::vector<std::size_t>{0, 1, 5});
    // Large coefficients leave the penalty's flat region: the last stage is unbiased.
    CHECK(res.final_fit().beta[1] == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::abs(res.final_fit().beta[1] - 2.0) < std::abs(res.stages.front().beta[1] - 2.0));
  }
}
