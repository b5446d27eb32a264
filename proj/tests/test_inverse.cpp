#include <cmath>
#include <vector>

#include "doctest.h"
#include "resetfpt/errors.hpp"
#include "resetfpt/forward.hpp"
#include "resetfpt/inverse.hpp"

using namespace resetfpt;

namespace {

// Transforms and means written out from their defining formulas, independent
// of the library's forward maps.
double reset_weight(double lambda, double r, double x_reset) {
  const double k = r * std::exp(-x_reset * std::sqrt(2.0 * (lambda + r)));
  return k / (lambda + k);
}

double exp_initial_lt(double lambda, double nu, double r, double x_reset) {
  const double s = std::sqrt(2.0 * (lambda + r));
  const double k = r * std::exp(-x_reset * s);
  return (lambda * nu / (nu + s) + k) / (lambda + k);
}

double poisson_initial_lt(double lambda, double nu, double r, double x_reset) {
  const double c = reset_weight(lambda, r, x_reset);
  const double s = std::sqrt(2.0 * (lambda + r));
  return (1.0 - c) * std::exp(nu * (std::exp(-s) - 1.0)) + c;
}

double geometric_initial_lt(double lambda, double p, double r, double x_reset) {
  const double c = reset_weight(lambda, r, x_reset);
  const double s = std::sqrt(2.0 * (lambda + r));
  return (1.0 - c) * p / (1.0 - (1.0 - p) * std::exp(-s)) + c;
}

double uniform_reset_lt(double lambda, double x, double r) {
  const double s = std::sqrt(2.0 * (lambda + r));
  const double e = std::exp(-x * s);
  return e + (1.0 - e) / (x * s) * std::log((lambda + r) / (lambda + r * e));
}

InverseSetting initial(double mu, double r, double x_reset, double b = 1.0) {
  InverseSetting s;
  s.which = InverseCase::RandomInitial;
  s.mu = mu;
  s.r = r;
  s.x_reset = x_reset;
  s.b = b;
  return s;
}

InverseSetting reset(double x, double r, double b = 1.0) {
  InverseSetting s;
  s.which = InverseCase::RandomReset;
  s.x = x;
  s.r = r;
  s.b = b;
  return s;
}

double fitted(const InverseSolution& s, const char* name) {
  for (const auto& [n, v] : s.fitted) {
    if (n == name) return v;
  }
  FAIL("parameter not fitted");
  return 0.0;
}

}  // namespace

TEST_CASE("ifpp recovers the uniform law and a beta shape") {
  const auto setting = initial(0.0, 1.0, 0.5);
  const auto u = solve_ifpp(0.5, setting, SearchSpace::candidates({DensityFamily::uniform(0.0, 1.0)}));
  CHECK(u.residual < 1e-10);
  CHECK(u.status == SolutionStatus::Exact);

  const auto drifted = initial(0.4, 2.0, 0.3);
  const double q = q_case1(DensityFamily::beta(2.5, 1.5), 0.4, 2.0, 0.3, 1.0).value;
  const auto space = SearchSpace::parametric(DensityFamily::beta(1.0, 1.5), {"alpha"}, {{0.2}, {10.0}});
  const auto sol = solve_ifpp(q, drifted, space);
  CHECK(fitted(sol, "alpha") == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(sol.status == SolutionStatus::Exact);
  CHECK(sol.locally_unique);
  CHECK(sol.replay == doctest::Approx(q).epsilon(1e-12));
  CHECK_THROWS_AS(solve_ifpp(1.0, drifted, space), DomainError);
}

TEST_CASE("linear closed form") {
  const double quniform = q_case1(DensityFamily::uniform(0.0, 1.0), 0.3, 1.5, 0.4, 1.0).value;
  const auto lin = ifpp_linear_closed_form(quniform, 0.3, 1.5, 0.4);
  CHECK(lin.a1 == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(lin.a0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lin.warning.empty());

  // Round trips through the forward map over a spread of settings.
  const double mus[] = {-1.0, 0.0, 0.7, 2.0};
  const double rs[] = {0.5, 1.0, 3.0};
  const double xrs[] = {0.1, 0.5, 0.85};
  for (double mu : mus) {
    for (double r : rs) {
      for (double xr : xrs) {
        const double q = q_case1(DensityFamily::linear(0.9, 0.55), mu, r, xr, 1.0).value;
        const auto c = ifpp_linear_closed_form(q, mu, r, xr);
        CHECK(c.a1 == doctest::Approx(0.9).epsilon(1e-9));
        const double back = q_case1(DensityFamily::linear(c.a1, c.a0), mu, r, xr, 1.0).value;
        CHECK(std::abs(back - q) < 1e-10);
      }
    }
  }

  // The linear family's q range is reached at a1 = +-2; beyond it the line dips below 0.
  const double qmax = q_case1(DensityFamily::linear(-2.0, 2.0), 0.0, 1.0, 0.5, 1.0).value;
  const auto edge = ifpp_linear_closed_form(qmax + 0.01, 0.0, 1.0, 0.5);
  CHECK_FALSE(edge.warning.empty());
  CHECK(edge.a1 < -2.0);

  // Solving within the linear family agrees with the closed form.
  const double q = 0.47;
  const auto c = ifpp_linear_closed_form(q, 0.2, 1.0, 0.6);
  const auto sol = solve_ifpp(q, initial(0.2, 1.0, 0.6),
                              SearchSpace::parametric(DensityFamily::linear(0.0, 1.0), {"a1"}, {{-2.0}, {2.0}}));
  CHECK(fitted(sol, "a1") == doctest::Approx(c.a1).epsilon(1e-9));
  CHECK(sol.family.parameters()[1].second == doctest::Approx(c.a0).epsilon(1e-9));
}

TEST_CASE("symmetric class cannot reach q != 1/2 when pi0 is 1 - x") {
  const double r = 1.0;
  const double xr = 0.3;
  InverseSetting s = initial(0.0, r, xr);
  s.model = DiffusionModel::custom([=](double x) { return r * (x - xr); }, [](double) { return 1.0; },
                                   "r (x - x_R)");
  const auto space = SearchSpace::parametric(DensityFamily::beta(2.0, 2.0), {"alpha"}, {{1.0}, {20.0}},
                                             {{"beta", "alpha"}});
  const auto sol = solve_ifpp(0.3, s, space);
  CHECK(sol.status == SolutionStatus::NoSolutionInClass);
  REQUIRE(sol.certificate.has_value());
  CHECK(sol.certificate->lo == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.certificate->hi == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.residual == doctest::Approx(0.04).epsilon(1e-5));
  // q = 1/2 is reached by every member.
  CHECK(solve_ifpp(0.5, s, space).status == SolutionStatus::Exact);
}

TEST_CASE("ghat from fhat reproduces the initial-position transform") {
  const double r = 1.0;
  const double xr = 1.0;
  const double lo = std::sqrt(2.0 * r) + 1e-3;
  for (int i = 0; i < 50; ++i) {
    const double theta = lo + (20.0 - lo) * i / 49.0;
    const double ghat = ifpt_ghat_from_fhat(
        theta, [&](double l) { return exp_initial_lt(l, 1.5, r, xr); }, 0.0, r, xr);
    CHECK(std::abs(ghat - 1.5 / (1.5 + theta)) < 1e-8);
  }
  // Point mass and a drifted gamma law, through the library's forward transform.
  const auto pm = DensityFamily::point_mass(0.7);
  const auto gm = DensityFamily::gamma(2.0, 3.0);
  const double mu = -0.4;
  const double root = mu + std::sqrt(mu * mu + 2.0 * r);
  for (double theta : {root + 1e-3, root + 0.5, 3.0, 10.0}) {
    const double a = ifpt_ghat_from_fhat(
        theta, [&](double l) { return fpt_lt_case1(l, pm, mu, r, xr).value; }, mu, r, xr);
    CHECK(std::abs(a - std::exp(-0.7 * theta)) < 1e-8);
    const double b = ifpt_ghat_from_fhat(
        theta, [&](double l) { return fpt_lt_case1(l, gm, mu, r, xr).value; }, mu, r, xr);
    CHECK(std::abs(b - gm.laplace(theta)) < 1e-8);
  }
  auto f = [&](double l) { return exp_initial_lt(l, 1.0, r, xr); };
  CHECK_THROWS_AS(ifpt_ghat_from_fhat(std::sqrt(2.0) + 5e-7, f, 0.0, r, xr), SingularityError);
  CHECK_THROWS_AS(ifpt_ghat_from_fhat(-std::sqrt(2.0), f, 0.0, r, xr), SingularityError);
  CHECK_THROWS_AS(ifpt_ghat_from_fhat(0.5, f, 0.0, r, xr), DomainError);
  CHECK_THROWS_AS(ifpt_ghat_from_fhat(-3.0, f, 0.0, r, xr), DomainError);
}

TEST_CASE("ifpt recovers exponential, Poisson and geometric initial laws") {
  const auto setting = initial(0.0, 1.0, 1.0);
  const auto e = solve_ifpt(FptLawSpec::from_transform([](double l) { return exp_initial_lt(l, 1.0, 1.0, 1.0); }),
                            setting,
                            SearchSpace::parametric(DensityFamily::exponential(3.0), {"theta"}, {{0.05}, {20.0}}));
  CHECK(fitted(e, "theta") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.status == SolutionStatus::Exact);
  CHECK(e.locally_unique);
  CHECK(e.objective == ObjectiveKind::TransformL2);

  const auto p = solve_ifpt(FptLawSpec::from_transform([](double l) { return poisson_initial_lt(l, 2.3, 1.0, 1.0); }),
                            setting,
                            SearchSpace::parametric(DensityFamily::poisson(1.0), {"nu"}, {{0.1}, {10.0}}));
  CHECK(fitted(p, "nu") == doctest::Approx(2.3).epsilon(1e-6));

  const auto g = solve_ifpt(FptLawSpec::from_transform([](double l) { return geometric_initial_lt(l, 0.35, 1.0, 1.0); }),
                            setting,
                            SearchSpace::parametric(DensityFamily::geometric(0.5), {"p"}, {{0.01}, {0.99}}));
  CHECK(fitted(g, "p") == doctest::Approx(0.35).epsilon(1e-6));

  CHECK_THROWS_AS(solve_ifpt(FptLawSpec::from_transform([](double) { return 0.9; }), setting,
                             SearchSpace::candidates({DensityFamily::exponential(1.0)})),
                  DomainError);
}

TEST_CASE("ifpt with random reset position and with moment targets") {
  const double x = 0.8;
  const auto sol = solve_ifpt(FptLawSpec::from_transform([&](double l) { return uniform_reset_lt(l, x, 1.0); }),
                              reset(x, 1.0),
                              SearchSpace::parametric(DensityFamily::uniform(0.0, 0.5), {"hi"}, {{0.1}, {3.0}}));
  CHECK(sol.residual < 1e-10);
  CHECK(fitted(sol, "hi") == doctest::Approx(x).epsilon(1e-6));

  // First two moments of the exponential-initial law with nu = 1.
  const auto m = solve_ifpt(FptLawSpec::from_moments({2.4094862864547686, 15.416070678006825}),
                            initial(0.0, 1.0, 1.0),
                            SearchSpace::parametric(DensityFamily::exponential(2.0), {"theta"}, {{0.2}, {5.0}}));
  CHECK(m.objective == ObjectiveKind::MomentMatch);
  CHECK(fitted(m, "theta") == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(solve_ifpt(FptLawSpec::from_moments({1.0, 0.5}), initial(0.0, 1.0, 1.0),
                             SearchSpace::candidates({DensityFamily::exponential(1.0)})),
                  DomainError);
}

TEST_CASE("imfpt in both cases") {
  // Gamma(a, theta) initial law: m = e^{x_R k} (1 - (theta / (theta + k))^a) / r, k = mu + sqrt(mu^2 + 2r).
  const double mu = 0.3;
  const double r = 1.2;
  const double xr = 0.7;
  const double k = mu + std::sqrt(mu * mu + 2.0 * r);
  const double m = std::exp(xr * k) * (1.0 - std::pow(2.5 / (2.5 + k), 1.7)) / r;
  const auto g = solve_imfpt(m, initial(mu, r, xr),
                             SearchSpace::parametric(DensityFamily::gamma(1.7, 1.0), {"theta"}, {{0.05}, {50.0}}));
  CHECK(fitted(g, "theta") == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(g.status == SolutionStatus::Exact);

  // Uniform(0, x) reset law: m = 2 (cosh(x sqrt(2r)) - 1) / (r x sqrt(2r)).
  const double x = 0.6;
  const double s = std::sqrt(2.0);
  const double mu_reset = 2.0 * (std::cosh(x * s) - 1.0) / (x * s);
  const auto u = solve_imfpt(mu_reset, reset(x, 1.0),
                             SearchSpace::parametric(DensityFamily::uniform(0.0, 1.0), {"hi"}, {{0.1}, {2.0}}));
  CHECK(u.residual < 1e-12);
  CHECK(fitted(u, "hi") == doctest::Approx(x).epsilon(1e-8));

  // As theta grows the mean tends to 0 without reaching it.
  const auto expo = SearchSpace::parametric(DensityFamily::exponential(1.0), {"theta"}, {{0.01}, {1e4}});
  try {
    solve_imfpt(1e-6, initial(0.0, 1.0, 1.0), expo);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.attainable_lo() > 1e-6);
    CHECK(e.attainable_hi() > e.attainable_lo());
  }
  CHECK_THROWS_AS(solve_imfpt(-1.0, initial(0.0, 1.0, 1.0), expo), DomainError);
}

TEST_CASE("imfet in both cases") {
  // Uniform initial law on (0, 1), mu = 0, r = 1, x_R = 1/2, from the C_1, C_2 constants.
  const auto b = solve_imfet(0.175150195248749117607418665604, initial(0.0, 1.0, 0.5),
                             SearchSpace::parametric(DensityFamily::beta(2.0, 1.0), {"alpha"}, {{0.2}, {5.0}}));
  CHECK(fitted(b, "alpha") == doctest::Approx(1.0).epsilon(1e-8));

  // Binomial(n, p) initial law on [0, n].
  const int n = 3;
  const double r = 0.8;
  const double xr = 1.4;
  const double s = std::sqrt(2.0 * r);
  const double den = 1.0 - std::exp(-s * n) - std::exp(-2.0 * s * xr) * (1.0 - std::exp(s * n));
  const double c1 = std::exp(-s * xr) * (1.0 - std::exp(s * n)) / den / r;
  const double c2 = -std::exp(-s * xr) * (1.0 - std::exp(-s * n)) / den / r;
  const double p = 0.37;
  const double m = c1 * (std::pow(1.0 - p + p * std::exp(-s), n) - 1.0) +
                   c2 * (std::pow(1.0 - p + p * std::exp(s), n) - 1.0);
  const auto bin = solve_imfet(m, initial(0.0, r, xr, n),
                               SearchSpace::parametric(DensityFamily::binomial(n, 0.5), {"p"}, {{0.01}, {0.99}}));
  CHECK(fitted(bin, "p") == doctest::Approx(p).epsilon(1e-8));

  // Uniform(0, b) reset law; mean from the arctangent closed form.
  const double x = 0.3;
  const double sr = std::sqrt(2.0);
  const double cb = 1.0 - std::exp(-sr);
  const double db = 1.0 - std::exp(sr);
  const double kk = std::sqrt(-db / cb);
  const double pre = ((std::exp(-x * sr) - 1.0) * (1.0 - std::exp(sr)) -
                      (std::exp(x * sr) - 1.0) * (1.0 - std::exp(-sr)));
  const double m46 = pre / (sr * std::sqrt(-cb * db)) * (std::atan(kk) - std::atan(kk * std::exp(-sr)));
  CHECK(m46 == doctest::Approx(0.203970918668859787886233806947).epsilon(1e-12));
  const auto u = solve_imfet(m46, reset(x, 1.0),
                             SearchSpace::candidates({DensityFamily::uniform(0.0, 1.0), DensityFamily::beta(2.0, 2.0)}));
  CHECK(u.residual < 1e-12);
  CHECK(u.family == DensityFamily::uniform(0.0, 1.0));
  CHECK_THROWS_AS(solve_imfet(10.0, reset(x, 1.0), SearchSpace::candidates({DensityFamily::uniform(0.0, 1.0)})),
                  RangeError);
}

TEST_CASE("search spaces") {
  const auto s = SearchSpace::parametric(DensityFamily::scaled_beta(2.0, 3.0, 2.0), {"alpha", "upper"},
                                         {{0.5, 1.0}, {5.0, 3.0}});
  CHECK(s.dim() == 2);
  CHECK(s.build({1.5, 2.5}) == DensityFamily::scaled_beta(1.5, 3.0, 2.5));
  CHECK_THROWS_AS(s.build({6.0, 2.5}), DomainError);
  CHECK_THROWS_AS(SearchSpace::parametric(DensityFamily::exponential(1.0), {"nu"}, {{0.1}, {1.0}}), ConfigError);
  CHECK_THROWS_AS(SearchSpace::parametric(DensityFamily::exponential(1.0), {"theta"}, {{1.0}, {0.1}}), ConfigError);
  CHECK_THROWS_AS(SearchSpace::candidates({}), ConfigError);
  const auto lin = SearchSpace::parametric(DensityFamily::linear(0.0, 1.0), {"a0"}, {{0.0}, {2.0}});
  CHECK(lin.build({0.25}) == DensityFamily::linear(1.5, 0.25));
}
