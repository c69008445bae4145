#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sqr/cd_solver.hpp"
#include "sqr/error.hpp"
#include "sqr/model_selection.hpp"

using namespace sqr;

TEST_SUITE("model_selection") {
  TEST_CASE("default bandwidth") {
    CHECK(default_bandwidth(500, 400, 0.5) == doctest::Approx(0.16545).epsilon(1e-3));
    CHECK(default_bandwidth(500, 400, 0.5) / default_bandwidth(500, 400, 0.3) == doctest::Approx(1.0911).epsilon(1e-4));
    CHECK(default_bandwidth(100000000, 2, 0.5) == 0.05);
    CHECK(default_bandwidth(500, 400, 0.3) == doctest::Approx(default_bandwidth(500, 400, 0.7)).epsilon(1e-15));
    CHECK_THROWS_AS(default_bandwidth(1, 10, 0.5), Error);
  }

  TEST_CASE("log grid spacing") {
    const auto g = log_grid(2.0, 50, 0.01);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 2.0);
    CHECK(g.back() == doctest::Approx(0.02).epsilon(1e-15));
    const double ratio = g[1] / g[0];
    CHECK(ratio == doctest::Approx(std::pow(0.01, 1.0 / 49)).epsilon(1e-14));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] / g[k - 1] == doctest::Approx(ratio).epsilon(1e-12));
    CHECK_THROWS_AS(log_grid(1.0, 1, 0.1), Error);
    CHECK_THROWS_AS(log_grid(1.0, 10, 1.5), Error);
  }

  TEST_CASE("intercept-only fit solves its first-order condition") {
    std::mt19937_64 rng(60);
    const auto d = testing::random_dataset(70, 2, rng, Vector{3.0, 1.0, 1.0}, 2.0);
    for (KernelId k : kAllKernels) {
      for (double tau : {0.2, 0.5, 0.9}) {
        const SmoothSpec spec{tau, 0.4, k};
        auto score = [&](double b) {
          double s = 0.0;
          for (double yi : d.y) s -= smoothed_loss_derivative(spec, yi - b);
          return s;
        };
        const double ref = testing::bisect(score, -100.0, 100.0);
        CAPTURE(to_string(k));
        CHECK(intercept_only_fit(d, spec) == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("lambda max is the gradient bound at the intercept-only fit") {
    std::mt19937_64 rng(61);
    const auto d = testing::random_dataset(60, 4, rng, Vector{0.0, 1.0, 0.0, 0.5});
    const SmoothSpec spec{0.4, 0.5, KernelId::Gaussian};
    Vector b0(5, 0.0);
    b0[0] = intercept_only_fit(d, spec);
    const auto g = gradient(d, spec, b0);
    double top = 0.0;
    for (std::size_t j = 1; j < 5; ++j) top = std::max(top, std::abs(g[j]));
    CHECK(lambda_max(d, spec) == doctest::Approx(top).epsilon(1e-14));
    CHECK(std::abs(g[0]) <= 1e-10);
    const auto grid = lambda_grid(d, spec, 10, 0.1);
    CHECK(grid.front() == doctest::Approx(top));
    CHECK_THROWS_AS(lambda_max(d, spec, {0, 1, 2, 3, 4}), Error);
  }

  TEST_CASE("fold assignment") {
    const auto a = assign_folds(23, 5, 7);
    CHECK(a == assign_folds(23, 5, 7));
    CHECK(a != assign_folds(23, 5, 8));
    std::vector<int> counts(5, 0);
    for (int f : a) ++counts.at(static_cast<std::size_t>(f));
    for (int c : counts) CHECK((c == 4 || c == 5));
    CHECK_THROWS_AS(assign_folds(3, 5, 1), Error);
    CHECK_THROWS_AS(assign_folds(10, 1, 1), Error);
  }

  TEST_CASE("argmin breaks ties toward the larger lambda") {
    CHECK(argmin_error({0.5, 0.3, 0.3, 0.4}, {true, true, true, true}) == 1);
    CHECK(argmin_error({0.5, 0.1, 0.3, 0.4}, {true, false, true, true}) == 2);
  }

  TEST_CASE("leave-one-out errors match an independent loop") {
    std::mt19937_64 rng(62);
    const auto d = testing::random_dataset(14, 2, rng, Vector{0.5, 1.0, -0.5}, 0.7);
    const SmoothSpec spec{0.4, 0.6, KernelId::Uniform};
    CdConfig tight;
    tight.epsilon = 1e-12;
    tight.kkt_tolerance = 1e-12;
    tight.max_iter = 100000;

    CvOptions opts;
    opts.penalty = PenaltySpec::make(PenaltyFamily::Scad, 0.1);
    opts.n_stages = 2;
    opts.grid = log_grid(0.5, 6, 0.05);
    opts.fold_ids.resize(14);
    std::iota(opts.fold_ids.begin(), opts.fold_ids.end(), 0);
    opts.folds = 14;
    opts.solver = tight;
    const auto cv = cross_validate(d, spec, opts);

    for (std::size_t k = 0; k < opts.grid.size(); ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < 14; ++i) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < 14; ++r)
          if (r != i) rows.push_back(r);
        const auto train = subset_rows(d, rows);
        auto pen = opts.penalty;
        pen.lambda = opts.grid[k];
        const auto res = fit_irw(train, spec, pen, 2, tight);
        const auto& b = res.final_fit().beta;
        double fit = 0.0;
        for (std::size_t j = 0; j < 3; ++j) fit += d.x(i, j) * b[j];
        const double loss = check_loss(spec.tau, d.y[i] - fit);
        CHECK(cv.fold_errors(i, k) == doctest::Approx(loss).epsilon(1e-6));
        total += loss;
      }
      CHECK(cv.mean_error[k] == doctest::Approx(total / 14).epsilon(1e-6));
    }
    CHECK(cv.selected_lambda == opts.grid[cv.selected_index]);
    CHECK(cv.selected_index == argmin_error(cv.mean_error, cv.valid));
  }

  TEST_CASE("selected refit and stage re-selection") {
    std::mt19937_64 rng(63);
    Vector truth(9, 0.0);
    truth[1] = 1.5;
    truth[3] = -1.0;
    const auto d = testing::random_dataset(120, 8, rng, truth, 0.5);
    const SmoothSpec spec{0.5, 0.4, KernelId::Uniform};
    CvOptions opts;
    opts.penalty = PenaltySpec::make(PenaltyFamily::Scad, 0.1);
    opts.grid_size = 15;
    opts.min_ratio = 0.05;
    const auto cv = cross_validate(d, spec, opts);
    CHECK(cv.grid.size() == 15);
    CHECK(cv.grid.front() == doctest::Approx(lambda_max(d, spec)));
    CHECK(cv.failed_cells == 0);
    CHECK(cv.stage_fold_errors.size() == 3);
    auto pen = opts.penalty;
    pen.lambda = cv.selected_lambda;
    const auto direct = fit_irw(d, spec, pen, 3, CdConfig{});
    for (std::size_t j = 0; j < 9; ++j) CHECK(cv.selected_fit.beta[j] == doctest::Approx(direct.final_fit().beta[j]).epsilon(1e-9));

    const auto l1 = select_stage(cv, d, spec, opts, 1);
    CHECK(l1.stage == 1);
    CHECK(l1.selected.requested_stages == 1);
    CHECK(l1.fold_errors == cv.stage_fold_errors[0]);
  }

  TEST_CASE("fold count is fixed by the seed") {
    std::mt19937_64 rng(64);
    const auto d = testing::random_dataset(60, 4, rng, Vector{0.0, 1.0});
    const SmoothSpec spec{0.5, 0.5, KernelId::Uniform};
    CvOptions opts;
    opts.penalty = PenaltySpec::make(PenaltyFamily::L1, 0.1);
    opts.n_stages = 1;
    opts.grid_size = 5;
    opts.seed = 99;
    const auto a = cross_validate(d, spec, opts);
    opts.threads = 3;
    const auto b = cross_validate(d, spec, opts);
    CHECK(a.fold_errors == b.fold_errors);
    CHECK(a.selected_fit.beta == b.selected_fit.beta);
  }
}
