#include <chrono>
#include <cmath>

#include "doctest.h"
#include "resetfpt/analytic.hpp"
#include "resetfpt/errors.hpp"
#include "resetfpt/expression.hpp"

using namespace resetfpt;

namespace {

double sup_error(const BvpSolution& s, const std::function<double(double)>& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) worst = std::max(worst, std::abs(s.f[i] - exact(s.x[i])));
  return worst;
}

}  // namespace

TEST_CASE("bvp reproduces the drifted BM exit probability") {
  for (auto [mu, r, xr, b] : {std::array{0.0, 1.0, 0.25, 1.0}, std::array{0.7, 2.0, 0.3, 1.0},
                              std::array{-1.2, 0.5, 1.1, 2.0}, std::array{0.3, 1.0, 1 / 3.0, 1.0},
                              std::array{0.2, 1.5, 0.123456789, 1.0}}) {
    const auto s = bvp_solve(DiffusionModel::brownian_drift(mu), 0.0, b, r, xr,
                             BvpTarget::ExitProbability);
    INFO("mu=" << mu << " xr=" << xr);
    CHECK(sup_error(s, [&](double x) { return pi0_bm(x, mu, r, xr, b); }) < 1e-6);
    CHECK(s.nonlocal_gap < 1e-10);
    CHECK(s.residual < 1e-6);
    CHECK(s.order >= 1.9);
  }
}

TEST_CASE("bvp reproduces the drifted BM mean exit time") {
  for (auto [mu, r, xr, b] : {std::array{0.0, 1.0, 0.5, 1.0}, std::array{0.5, 3.0, 0.2, 1.5}}) {
    const auto s = bvp_solve(DiffusionModel::brownian_drift(mu), 0.0, b, r, xr,
                             BvpTarget::MeanExitTime);
    CHECK(sup_error(s, [&](double x) { return mean_fet_bm(x, mu, r, xr, b); }) < 1e-6);
    CHECK(s.nonlocal_gap < 1e-10);
  }
}

TEST_CASE("bvp with drift r(x - x_R) gives the linear exit probability") {
  const double r = 1.7, xr = 0.35, b = 1.5;
  for (auto sigma : {std::function<double(double)>([](double) { return 1.0; }),
                     std::function<double(double)>([](double x) { return 0.5 + x * x; })}) {
    auto model = DiffusionModel::custom([=](double x) { return r * (x - xr); }, sigma, "linear drift");
    const auto s = bvp_solve(model, 0.0, b, r, xr, BvpTarget::ExitProbability);
    CHECK(sup_error(s, [&](double x) { return 1.0 - x / b; }) < 1e-6);
  }
}

TEST_CASE("bvp with drift A - B / 2^x gives 2 - 2^x") {
  const double r = 1.0, xr = 0.4, sigma = 0.8;
  const double ln2 = std::log(2.0);
  const double A = r / ln2 - 0.5 * ln2 * sigma * sigma;
  const double B = r / ln2 * std::pow(2.0, xr);
  Expression drift("A - B / 2^x", {{"A", A}, {"B", B}});
  auto model = DiffusionModel::custom(drift, [=](double) { return sigma; }, drift.source());
  const auto s = bvp_solve(model, 0.0, 1.0, r, xr, BvpTarget::ExitProbability);
  CHECK(sup_error(s, [](double x) { return 2.0 - std::pow(2.0, x); }) < 1e-6);
  CHECK(s(0.37) == doctest::Approx(2.0 - std::pow(2.0, 0.37)).epsilon(1e-7));
}

TEST_CASE("bvp handles no resetting and tabulated coefficients") {
  const auto s = bvp_solve(DiffusionModel::brownian_drift(0.8), 0.0, 1.0, 0.0, 0.5,
                           BvpTarget::ExitProbability);
  CHECK(sup_error(s, [](double x) { return pi0_classical(x, 0.8, 1.0); }) < 1e-6);

  std::vector<double> xs, mus, sig;
  for (int i = 0; i <= 40; ++i) {
    xs.push_back(i / 40.0);
    mus.push_back(-0.3);
    sig.push_back(1.0);
  }
  const auto t = bvp_solve(DiffusionModel::tabulated(xs, mus, sig), 0.0, 1.0, 1.0, 0.6,
                           BvpTarget::ExitProbability);
  CHECK(sup_error(t, [](double x) { return pi0_bm(x, -0.3, 1.0, 0.6, 1.0); }) < 1e-6);
}

TEST_CASE("bvp input validation") {
  const auto m = DiffusionModel::brownian_drift(0.0);
  CHECK_THROWS_AS(bvp_solve(m, 0.0, 1.0, 1.0, 1.2, BvpTarget::ExitProbability), DomainError);
  CHECK_THROWS_AS(bvp_solve(m, 1.0, 0.0, 1.0, 0.5, BvpTarget::ExitProbability), DomainError);
  auto bad = DiffusionModel::custom([](double) { return 0.0; }, [](double x) { return x - 0.5; }, "bad");
  CHECK_THROWS_AS(bvp_solve(bad, 0.0, 1.0, 1.0, 0.3, BvpTarget::ExitProbability), DomainError);
}

TEST_CASE("expression parser") {
  Expression e("2*x^2 - 3/(1+x) + exp(-x) + sqrt(4)");
  CHECK(e(1.0) == doctest::Approx(2.0 - 1.5 + std::exp(-1.0) + 2.0));
  CHECK(Expression("-2^2")(0.0) == -4.0);
  CHECK(Expression("2^3^2")(0.0) == 512.0);
  CHECK(Expression("k*x", {{"k", 3.0}})(2.0) == 6.0);
  CHECK_THROWS_AS(Expression("2*"), ConfigError);
  CHECK_THROWS_AS(Expression("foo(x)"), ConfigError);
  CHECK_THROWS_AS(Expression("(x"), ConfigError);
}
