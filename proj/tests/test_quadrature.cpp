#include <cmath>

#include "doctest.h"
#include "resetfpt/errors.hpp"
#include "resetfpt/quadrature.hpp"

using namespace resetfpt;

TEST_CASE("single panel integrates polynomials of degree 22 exactly") {
  auto r = gauss_kronrod_15([](double x) { return std::pow(x, 22); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 23.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature") {
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 10.0).value ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));
  // Integrable endpoint singularity: bisection alone converges like sqrt(h).
  QuadOptions opts;
  opts.rel_tol = 1e-6;
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opts).value ==
        doctest::Approx(2.0).epsilon(1e-6));
  // Reversed bounds change the sign.
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0).value == doctest::Approx(-0.5));
  CHECK(integrate([](double x) { return x; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("quadrature failures") {
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, INFINITY), DomainError);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), QuadratureError);
}
