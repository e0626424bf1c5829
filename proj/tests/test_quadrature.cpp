#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qld/errors.hpp"
#include "qld/quadrature.hpp"

using namespace qld;

TEST_CASE("smooth finite integrals") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::exp(x); }, -1.0, 2.0).value ==
        doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-13));
  const auto r = integrate([](double x) { return x * x; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
}

TEST_CASE("endpoint singularities") {
  // int_0^1 x^{-1/2} = 2, int_0^1 log x = -1.
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(integrate([](double x) { return std::log(x); }, 0.0, 1.0).value ==
        doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("reversed limits change sign") {
  const auto f = [](double x) { return x * x; };
  CHECK(integrate(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("algebraic tails") {
  // int_0^inf (1+x)^{-2} = 1, int_1^inf x^{-1.2} = 5.
  CHECK(integrate_to_infinity([](double x) { return std::pow(1.0 + x, -2.0); }, 0.0, 2.0)
            .value == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(integrate_to_infinity([](double x) { return std::pow(x, -1.2); }, 1.0, 1.2).value ==
        doctest::Approx(5.0).epsilon(1e-9));
  // int_0^inf 1/(1+x^2) = pi/2.
  CHECK(integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 2.0).value ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-11));
}

TEST_CASE("bulk far from the origin with a large scale") {
  // Density concentrated near 1e4 with an x^{-3} tail.
  const auto f = [](double x) { return 2.0 * 1e8 / std::pow(1e4 + x, 3.0); };
  CHECK(integrate_to_infinity(f, 0.0, 3.0, 1e4).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("failures are reported with the error estimate") {
  QuadratureOptions opts;
  opts.max_intervals = 4;
  const auto f = [](double x) { return std::sin(1.0 / x); };
  try {
    integrate(f, 1e-4, 1.0, opts);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.error_estimate() > 0.0);
  }
  CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericalError);
  CHECK_THROWS_AS(integrate_to_infinity([](double x) { return 1.0 / x; }, 1.0, 1.0),
                  DomainError);
}
