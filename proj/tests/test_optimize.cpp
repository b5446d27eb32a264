#include <cmath>

#include "doctest.h"
#include "resetfpt/errors.hpp"
#include "resetfpt/optimize.hpp"

using namespace resetfpt;

TEST_CASE("Nelder-Mead finds the Rosenbrock minimum") {
  const Objective rosen = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const OptimResult r = minimize(rosen, Box{{-2.0, -1.0}, {2.0, 3.0}});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.hessian_positive_definite);
}

TEST_CASE("minimum on a box face") {
  const Objective f = [](const std::vector<double>& x) {
    return std::pow(x[0] + 1.0, 2) + std::pow(x[1] - 0.3, 2);
  };
  const OptimResult r = minimize(f, Box{{0.0, 0.0}, {1.0, 1.0}});
  CHECK(r.x[0] == 0.0);
  CHECK(r.x[1] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("restarts escape a local minimum") {
  // Local minimum near x = 1.13, global minimum near x = -1.30.
  const Objective f = [](const std::vector<double>& x) {
    return std::pow(x[0], 4) - 3.0 * x[0] * x[0] + x[0];
  };
  const OptimResult r = minimize(f, Box{{-2.0}, {2.0}}, {}, std::vector<double>{1.5});
  CHECK(r.x[0] == doctest::Approx(-1.3008).epsilon(1e-4));
}

TEST_CASE("argmin is invariant under objective scaling") {
  const Objective f = [](const std::vector<double>& x) {
    return std::pow(std::exp(-x[0]) - 0.4, 2) + 0.1 * std::pow(x[1] - x[0], 2);
  };
  const Objective g = [&](const std::vector<double>& x) { return 1e3 * f(x); };
  const Box box{{0.0, 0.0}, {5.0, 5.0}};
  const OptimResult a = minimize(f, box);
  const OptimResult b = minimize(g, box);
  CHECK(a.x[0] == doctest::Approx(b.x[0]).epsilon(1e-6));
  CHECK(a.x[1] == doctest::Approx(b.x[1]).epsilon(1e-6));
  CHECK(a.x[0] == doctest::Approx(-std::log(0.4)).epsilon(1e-6));
}

TEST_CASE("flat directions are reported") {
  const Objective f = [](const std::vector<double>& x) { return std::pow(x[0] + x[1] - 1.0, 2); };
  const OptimResult r = minimize(f, Box{{0.0, 0.0}, {1.0, 1.0}});
  CHECK(r.value < 1e-20);
  CHECK_FALSE(r.hessian_positive_definite);
}

TEST_CASE("optimizer errors") {
  const Objective nan = [](const std::vector<double>&) { return std::nan(""); };
  CHECK_THROWS_AS(minimize(nan, Box{{0.0}, {1.0}}), OptimError);
  const Objective f = [](const std::vector<double>& x) { return x[0]; };
  CHECK_THROWS_AS(minimize(f, Box{{1.0}, {0.0}}), DomainError);
}

TEST_CASE("root finding") {
  CHECK(find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0) ==
        doctest::Approx(0.7390851332151607).epsilon(1e-14));
  CHECK(find_root([](double x) { return x * x - 2.0; }, 2.0, 0.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), DomainError);
}
