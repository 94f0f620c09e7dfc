#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlpf/error.hpp"
#include "nlpf/kernel.hpp"

using namespace nlpf;

TEST_SUITE("kernel") {
  TEST_CASE("kernel_eval at the centre, the support edge and half radius") {
    CHECK(kernel_eval(KernelSpec(1.0, 1.0, 1), 0.0) == doctest::Approx(7.5).epsilon(1e-15));
    const KernelSpec k(0.02, 0.1540, 1);
    CHECK(kernel_eval(k, k.delta()) == 0.0);
    CHECK(kernel_eval(k, 2.0 * k.delta()) == 0.0);
    const double expected = 0.02 * 0.02 * (15.0 / (2.0 * std::pow(0.1540, 3))) * 0.75;
    CHECK(kernel_eval(k, 0.077) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("scaling constant") {
    CHECK(scaling_constant(1, 0.1) == doctest::Approx(7500.0).epsilon(1e-14));
    CHECK(scaling_constant(1, 1.0) == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(scaling_constant(2, 1.0) == doctest::Approx(24.0 / std::numbers::pi).epsilon(1e-15));
  }

  TEST_CASE("second moment equals 2 n eps^2") {
    CHECK(second_moment_check(KernelSpec(1.0, 1.0, 1)) <= 1e-8);
    CHECK(second_moment_check(KernelSpec(0.02, 0.1540, 1)) <= 1e-8);
    CHECK(second_moment_check(KernelSpec(0.01, 0.0826, 2)) <= 1e-8);
  }

  TEST_CASE("c_gamma closed form against quadrature and reference values") {
    const KernelSpec k1(0.02, 0.1540, 1), k3(0.01, 0.0826, 2), unit(1.0, 1.0, 1);
    for (const auto* k : {&k1, &k3, &unit}) {
      const double c = c_gamma_closed_form(*k);
      CHECK(std::abs(c - c_gamma_quadrature(*k)) / c <= 1e-8);
    }
    CHECK(c_gamma_closed_form(unit) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(c_gamma_closed_form(k1) == doctest::Approx(0.16866).epsilon(1e-4));
    CHECK(c_gamma_closed_form(k3) == doctest::Approx(0.17588).epsilon(1e-4));
  }

  TEST_CASE("xi of the reference parameter sets") {
    const double c_F = 1.0 / 6.0;
    CHECK(std::abs(xi(KernelSpec(0.02, 0.1540, 1), c_F) - 0.002) <= 5e-5);
    CHECK(std::abs(xi(KernelSpec(0.01, 0.0826, 2), c_F) - 0.0093) <= 2e-4);
    const KernelSpec k(0.3, 1.0, 1);
    CHECK(xi(k, c_gamma_closed_form(k)) == 0.0);
  }

  TEST_CASE("invalid parameters throw") {
    CHECK_THROWS_AS(KernelSpec(0.0, 0.1, 1), Error);
    CHECK_THROWS_AS(KernelSpec(0.1, -0.1, 1), Error);
    CHECK_THROWS_AS(KernelSpec(0.1, 0.1, 3), Error);
  }
}
