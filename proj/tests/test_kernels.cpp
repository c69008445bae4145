#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sqr/error.hpp"
#include "sqr/kernels.hpp"

using namespace sqr;

TEST_SUITE("kernels") {
  TEST_CASE("density values") {
    CHECK(kernel_density(KernelId::Uniform, 0.0) == doctest::Approx(0.5));
    CHECK(kernel_density(KernelId::Gaussian, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(kernel_density(KernelId::Epanechnikov, 2.0) == 0.0);
    for (KernelId k : kAllKernels) {
      for (double u : {0.1, 0.7, 1.5, 3.0}) {
        CHECK(kernel_density(k, u) == kernel_density(k, -u));
        CHECK(kernel_density(k, u) == doctest::Approx(testing::reference_density(k, u)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("densities integrate to one") {
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    for (KernelId k : kAllKernels) {
      auto f = [k](double t) { return kernel_density(k, t); };
      const double mass = gauss_kronrod<double, 61>::integrate(f, -inf, 0.0, 20, 1e-13) +
                          gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 20, 1e-13);
      CAPTURE(to_string(k));
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("cdf values and monotonicity") {
    CHECK(kernel_cdf(KernelId::Uniform, 0.5) == doctest::Approx(0.75));
    CHECK(kernel_cdf(KernelId::Gaussian, 0.0) == doctest::Approx(0.5));
    CHECK(kernel_cdf(KernelId::Laplacian, -1.0) == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-14));
    for (KernelId k : kAllKernels) {
      CHECK(kernel_cdf(k, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
      double prev = 0.0;
      for (double u = -8.0; u <= 8.0; u += 0.01) {
        const double c = kernel_cdf(k, u);
        CHECK(c >= prev);
        CHECK(c <= 1.0);
        prev = c;
      }
    }
  }

  TEST_CASE("cdf is the integral of the density") {
    using boost::math::quadrature::gauss_kronrod;
    for (KernelId k : kAllKernels) {
      for (double u : {-2.5, -0.6, 0.3, 0.95, 4.0}) {
        auto f = [k](double t) { return testing::reference_density(k, t); };
        // Integrate 0..|u| piecewise, split where compact kernels stop.
        const double a = std::abs(u);
        double mass = 0.0;
        double lo = 0.0;
        for (double hi : {std::min(a, 1.0), a}) {
          if (hi > lo) mass += gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14);
          lo = hi;
        }
        const double q = 0.5 + (u >= 0 ? mass : -mass);
        CAPTURE(to_string(k));
        CAPTURE(u);
        CHECK(kernel_cdf(k, u) == doctest::Approx(q).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("normal cdf accuracy") {
    // Reference values of Φ at selected points.
    CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
    CHECK(normal_cdf(-8.0) == doctest::Approx(6.220960574271785e-16).epsilon(1e-10));
  }

  TEST_CASE("smoothed loss examples") {
    CHECK(smoothed_loss({0.5, 1.0, KernelId::Uniform}, 0.0) == doctest::Approx(0.25));
    CHECK(smoothed_loss({0.3, 0.5, KernelId::Uniform}, 2.0) == doctest::Approx(0.6));
    CHECK(smoothed_loss({0.5, 1.0, KernelId::Laplacian}, 0.0) == doctest::Approx(0.5));
    CHECK(smoothed_loss({0.5, 1.0, KernelId::Gaussian}, 0.0) == doctest::Approx(std::sqrt(2.0 / M_PI) / 2).epsilon(1e-14));
  }

  TEST_CASE("smoothed loss matches quadrature on a coarse grid") {
    for (KernelId k : kAllKernels) {
      for (double tau : {0.2, 0.5, 0.85}) {
        for (double h : {0.05, 0.3, 2.0}) {
          for (double u = -3.0; u <= 3.0; u += 0.37) {
            CAPTURE(to_string(k));
            CAPTURE(tau);
            CAPTURE(h);
            CAPTURE(u);
            CHECK(std::abs(smoothed_loss({tau, h, k}, u) - testing::quadrature_smoothed_loss(k, tau, h, u)) <= 1e-8);
          }
        }
      }
    }
  }

  TEST_CASE("derivative examples") {
    for (KernelId k : kAllKernels) CHECK(smoothed_loss_derivative({0.5, 0.7, k}, 0.0) == doctest::Approx(0.0));
    CHECK(smoothed_loss_derivative({0.3, 1.0, KernelId::Uniform}, 2.0) == doctest::Approx(0.3));
    CHECK(smoothed_loss_derivative({0.5, 1.0, KernelId::Gaussian}, 1.0) == doctest::Approx(0.3413447460685429).epsilon(1e-13));
  }

  TEST_CASE("derivative and curvature agree with finite differences") {
    for (KernelId k : kAllKernels) {
      const bool kinked = k == KernelId::Uniform || k == KernelId::Epanechnikov;
      for (double tau : {0.3, 0.5, 0.7}) {
        for (double h : {0.1, 0.5, 1.0}) {
          const SmoothSpec spec{tau, h, k};
          for (double u = -4.0; u <= 4.0; u += 0.173) {
            if (kinked && std::abs(std::abs(u) - h) < h / 10) continue;
            const double s = 1e-6 * std::max(1.0, std::abs(u));
            const double fd = (smoothed_loss(spec, u + s) - smoothed_loss(spec, u - s)) / (2 * s);
            const double d = smoothed_loss_derivative(spec, u);
            CHECK(std::abs(fd - d) <= 1e-5 * std::max(1.0, std::abs(d)));
            const double fd2 = (smoothed_loss_derivative(spec, u + s) - smoothed_loss_derivative(spec, u - s)) / (2 * s);
            CHECK(std::abs(fd2 - smoothed_loss_curvature(spec, u)) <= 1e-4 * std::max(1.0, std::abs(fd2)));
          }
        }
      }
    }
  }

  TEST_CASE("derivative limits and monotonicity") {
    for (KernelId k : kAllKernels) {
      const SmoothSpec spec{0.3, 0.4, k};
      CHECK(smoothed_loss_derivative(spec, -1e3) == doctest::Approx(-0.7));
      CHECK(smoothed_loss_derivative(spec, 1e3) == doctest::Approx(0.3));
      double prev = -1.0;
      for (double u = -5.0; u <= 5.0; u += 0.01) {
        const double d = smoothed_loss_derivative(spec, u);
        CHECK(d >= prev);
        prev = d;
      }
    }
  }

  TEST_CASE("majorization and compact-support equality") {
    for (KernelId k : kAllKernels) {
      for (double tau : {0.1, 0.5, 0.9}) {
        const SmoothSpec spec{tau, 0.5, k};
        for (double u = -3.0; u <= 3.0; u += 0.05) {
          CHECK(smoothed_loss(spec, u) >= check_loss(tau, u) - 1e-15);
          if ((k == KernelId::Uniform || k == KernelId::Epanechnikov) && std::abs(u) >= 0.5) {
            CHECK(smoothed_loss(spec, u) == doctest::Approx(check_loss(tau, u)).epsilon(1e-14));
          }
        }
      }
    }
  }

  TEST_CASE("vanishing bandwidth recovers the check loss") {
    for (KernelId k : kAllKernels) {
      const SmoothSpec spec{0.3, 1e-8, k};
      for (double u : {-2.0, -0.5, -0.01, 0.01, 0.2, 3.0}) {
        CHECK(std::abs(smoothed_loss(spec, u) - check_loss(0.3, u)) <= 1e-6);
      }
    }
  }

  TEST_CASE("logistic loss is stable in the tails") {
    const SmoothSpec spec{0.4, 0.01, KernelId::Logistic};
    for (double u : {-1e4, -50.0, 50.0, 1e4}) {
      const double v = smoothed_loss(spec, u);
      CHECK(std::isfinite(v));
      CHECK(v == doctest::Approx(check_loss(0.4, u)).epsilon(1e-12));
    }
  }

  TEST_CASE("convexity on a grid") {
    for (KernelId k : kAllKernels) {
      const SmoothSpec spec{0.35, 0.6, k};
      for (double u = -3.0; u <= 3.0; u += 0.1) {
        const double mid = smoothed_loss(spec, u);
        CHECK(mid <= 0.5 * (smoothed_loss(spec, u - 0.05) + smoothed_loss(spec, u + 0.05)) + 1e-14);
      }
    }
  }

  TEST_CASE("identifiers round trip") {
    for (KernelId k : kAllKernels) CHECK(parse_kernel(to_string(k)) == k);
    CHECK_FALSE(parse_kernel("triangular").has_value());
    CHECK(to_string(KernelId::Epanechnikov) == "epanechnikov");
  }

  TEST_CASE("spec validation") {
    CHECK_THROWS_AS((SmoothSpec{1.5, 0.1, KernelId::Gaussian}.validate()), Error);
    CHECK_THROWS_AS((SmoothSpec{0.0, 0.1, KernelId::Gaussian}.validate()), Error);
    CHECK_THROWS_AS((SmoothSpec{0.5, 0.0, KernelId::Gaussian}.validate()), Error);
    CHECK_NOTHROW((SmoothSpec{0.5, 0.1, KernelId::Gaussian}.validate()));
  }
}
