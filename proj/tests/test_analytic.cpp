#include <cmath>
#include <random>

#include "doctest.h"
#include "resetfpt/analytic.hpp"
#include "resetfpt/errors.hpp"
#include "resetfpt/quadrature.hpp"

using namespace resetfpt;

TEST_CASE("exponents and coefficients") {
  auto c = bm_coefficients(0.0, 1.0, 0.5, 1.0);
  CHECK(c.d1 == doctest::Approx(-std::sqrt(2.0)));
  CHECK(c.d2 == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.c1p == doctest::Approx(c.c1).epsilon(1e-14));
  CHECK(c.c2p == doctest::Approx(c.c2).epsilon(1e-14));
  CHECK(c.pi0_at_reset == doctest::Approx(0.5).epsilon(1e-14));

  c = bm_coefficients(1.0, 2.0, 0.3, 1.0);
  CHECK(c.d1 == doctest::Approx(-1.0 - std::sqrt(5.0)).epsilon(1e-14));
  CHECK(c.d2 == doctest::Approx(-1.0 + std::sqrt(5.0)).epsilon(1e-14));
  CHECK(c.d1 * c.d2 == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(c.pi0_at_reset >= 0.0);
  CHECK(c.pi0_at_reset <= 1.0);

  CHECK_THROWS_AS(bm_coefficients(0.0, 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(bm_coefficients(0.0, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("exponent identities over a parameter grid") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> mu_d(-5, 5), r_d(1e-6, 50);
  for (int i = 0; i < 200; ++i) {
    const double mu = mu_d(gen), r = r_d(gen);
    const auto [d1, d2] = bm_exponents(mu, r);
    CHECK(d1 < 0.0);
    CHECK(d2 > 0.0);
    CHECK(d1 * d2 == doctest::Approx(-2.0 * r).epsilon(1e-13));
    CHECK(d1 + d2 == doctest::Approx(-2.0 * mu).epsilon(1e-13));
  }
}

TEST_CASE("pi0_bm boundary values, range and symmetry") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> mu_d(-3, 3), r_d(0.01, 20), b_d(0.2, 5), u(0.01, 0.99);
  for (int t = 0; t < 40; ++t) {
    const double mu = mu_d(gen), r = r_d(gen), b = b_d(gen), xr = b * u(gen);
    CHECK(pi0_bm(0.0, mu, r, xr, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pi0_bm(b, mu, r, xr, b) == doctest::Approx(0.0));
    for (int i = 0; i <= 200; ++i) {
      const double v = pi0_bm(b * i / 200.0, mu, r, xr, b);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  for (double r : {0.1, 1.0, 7.0}) CHECK(pi0_bm(0.5, 0.0, r, 0.5, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(pi0_bm(1.5, 0.0, 1.0, 0.5, 1.0), DomainError);
}

TEST_CASE("pi0_bm satisfies the nonlocal ODE") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> mu_d(-2, 2), r_d(0.05, 10), b_d(0.3, 3), u(0.05, 0.95);
  for (int t = 0; t < 20; ++t) {
    const double mu = mu_d(gen), r = r_d(gen), b = b_d(gen), xr = b * u(gen);
    const auto c = bm_coefficients(mu, r, xr, b);
    const double f_r = pi0_bm(xr, mu, r, xr, b);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = b * i / 200.0;
      const double f = c.c1 * (std::exp(c.d1 * x) - std::exp(c.d1 * b)) +
                       c.c2 * (std::exp(c.d2 * x) - std::exp(c.d2 * b));
      const double f1 = c.c1 * c.d1 * std::exp(c.d1 * x) + c.c2 * c.d2 * std::exp(c.d2 * x);
      const double f2 =
          c.c1 * c.d1 * c.d1 * std::exp(c.d1 * x) + c.c2 * c.d2 * c.d2 * std::exp(c.d2 * x);
      worst = std::max(worst, std::abs(0.5 * f2 + mu * f1 - r * f + r * f_r));
      CHECK(f == doctest::Approx(pi0_bm(x, mu, r, xr, b)).epsilon(1e-10));
    }
    CHECK(worst < 1e-9 * std::max(1.0, r));
  }
}

TEST_CASE("pi0_bm survives large exponents") {
  const double v = pi0_bm(5.0, 0.0, 200.0, 3.0, 60.0);
  CHECK(std::isfinite(v));
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
  // Continuity across the overflow switch at d2 b = 700.
  const double r = 0.5 * std::pow(700.0 / 10.0, 2);
  const double below = pi0_bm(4.0, 0.0, r * (1 - 1e-9), 5.0, 10.0);
  const double above = pi0_bm(4.0, 0.0, r * (1 + 1e-9), 5.0, 10.0);
  CHECK(below == doctest::Approx(above).epsilon(1e-7));
  CHECK(std::isfinite(mean_fet_bm(5.0, 0.0, 200.0, 3.0, 60.0)));
}

TEST_CASE("classical limit") {
  CHECK(pi0_classical(0.25, 0.0, 1.0) == doctest::Approx(0.75));
  CHECK(pi0_classical(0.5, 0.5, 1.0) ==
        doctest::Approx((std::exp(-0.5) - std::exp(-1.0)) / (1.0 - std::exp(-1.0))));
  CHECK(pi0_classical(0.0, 0.3, 2.0) == 1.0);
  // Series branch meets the exponential branch.
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(pi0_classical(x, 0.99e-7, 1.0) == doctest::Approx(pi0_classical(x, 1.01e-7, 1.0)).epsilon(1e-9));
    CHECK(pi0_classical(x, -0.99e-7, 1.0) == doctest::Approx(pi0_classical(x, -1.01e-7, 1.0)).epsilon(1e-9));
  }
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> mu_d(-2, 2), b_d(0.5, 3), u(0.05, 0.95);
  for (int t = 0; t < 10; ++t) {
    const double mu = mu_d(gen), b = b_d(gen), xr = b * u(gen);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double x = b * i / 199.0;
      worst = std::max(worst, std::abs(pi0_bm(x, mu, 1e-8, xr, b) - pi0_classical(x, mu, b)));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("mean first-passage time") {
  CHECK(mean_fpt_bm(0.0, 0.3, 1.0, 0.5) == 0.0);
  const double k = std::sqrt(2.0);
  CHECK(mean_fpt_bm(1.0, 0.0, 1.0, 1.0) == doctest::Approx((1 - std::exp(-k)) * std::exp(k)));
  const double limit = std::exp(0.7 * (0.4 + std::sqrt(0.16 + 3.0))) / 1.5;
  CHECK(mean_fpt_bm(1e3, 0.4, 1.5, 0.7) == doctest::Approx(limit).epsilon(1e-14));
  CHECK_THROWS_AS(mean_fpt_bm(1.0, 0.0, 0.0, 1.0), DomainError);
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double m = mean_fpt_bm(0.1 * i, -0.5, 2.0, 0.4);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("first-passage Laplace transform") {
  CHECK(fpt_lt_bm(0.0, 2.0, 0.3, 1.0, 0.5) == 1.0);
  CHECK(fpt_lt_bm(3.0, 0.0, 0.3, 1.0, 0.5) == 1.0);
  double prev = 1.0;
  for (int i = 1; i <= 60; ++i) {
    const double v = fpt_lt_bm(0.05 * i * i, 1.0, -0.4, 0.8, 0.6);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  for (double mu : {-1.0, 0.0, 0.7}) {
    const double h = 1e-4;
    const double d = (fpt_lt_bm(-h, 1.0, mu, 1.0, 1.0) - fpt_lt_bm(h, 1.0, mu, 1.0, 1.0)) / (2 * h);
    CHECK(d == doctest::Approx(mean_fpt_bm(1.0, mu, 1.0, 1.0)).epsilon(1e-5));
  }
  // Complex evaluation agrees on the real axis.
  const auto z = fpt_lt_bm(std::complex<double>(0.7, 0.0), 1.2, -0.3, 1.1, 0.4);
  CHECK(z.real() == doctest::Approx(fpt_lt_bm(0.7, 1.2, -0.3, 1.1, 0.4)).epsilon(1e-14));
  CHECK(std::abs(z.imag()) < 1e-15);
}

TEST_CASE("mean first-exit time") {
  CHECK(mean_fet_bm(0.0, 0.2, 1.0, 0.5, 1.0) == doctest::Approx(0.0));
  CHECK(mean_fet_bm(1.0, 0.2, 1.0, 0.5, 1.0) == doctest::Approx(0.0));
  CHECK(mean_fet_bm(0.5, 0.0, 1.0, 0.5, 1.0) > 0.0);
  for (double x : {0.1, 0.3, 0.45}) {
    CHECK(std::abs(mean_fet_bm(x, 0.0, 1.3, 1.0, 2.0) - mean_fet_bm(2.0 - x, 0.0, 1.3, 1.0, 2.0)) <
          1e-10);
  }
  // Nonlocal ODE: (1/2) f'' + mu f' - r f + r f(x_R) = -1, checked by finite differences.
  const double mu = 0.4, r = 2.0, xr = 0.3, b = 1.2, h = 1e-4;
  const double fr = mean_fet_bm(xr, mu, r, xr, b);
  for (double x : {0.2, 0.6, 1.0}) {
    const double f0 = mean_fet_bm(x, mu, r, xr, b);
    const double fp = mean_fet_bm(x + h, mu, r, xr, b);
    const double fm = mean_fet_bm(x - h, mu, r, xr, b);
    const double lhs = 0.5 * (fp - 2 * f0 + fm) / (h * h) + mu * (fp - fm) / (2 * h) - r * f0 + r * fr;
    CHECK(lhs == doctest::Approx(-1.0).epsilon(1e-5));
  }
}

TEST_CASE("conjugation") {
  const auto base = DensityFamily::uniform(0, 1);
  auto id = conjugate_transform(ConjugationMap::identity(), base);
  for (double x : {0.1, 0.5, 0.9}) CHECK(id.pdf(x) == base.pdf(x));

  auto feller = conjugate_transform(ConjugationMap::feller(), base);
  CHECK(feller.support().hi == doctest::Approx(0.25));
  CHECK(feller.pdf(0.09) == doctest::Approx(1.0 / 0.3));
  CHECK(feller.pdf(0.3) == 0.0);
  QuadOptions opts;
  opts.rel_tol = 1e-10;
  // x = t^2 / 4 removes the 1/sqrt(x) endpoint singularity.
  CHECK(integrate([&](double t) { return feller.pdf(0.25 * t * t) * 0.5 * t; }, 0.0, 1.0, opts)
            .value == doctest::Approx(1.0).epsilon(1e-8));

  const auto wf = ConjugationMap::wright_fisher();
  auto pm = conjugate_transform(wf, DensityFamily::point_mass(wf.v(0.37)));
  REQUIRE(pm.atoms().size() == 1);
  CHECK(pm.atoms()[0].x == doctest::Approx(0.37).epsilon(1e-14));
  CHECK_THROWS_AS(conjugate_transform(wf, DensityFamily::uniform(0, 4)), DomainError);

  for (const auto& m : {ConjugationMap::feller(), wf, ConjugationMap::logarithmic(0.3, 1.2)}) {
    for (double x : {0.05, 0.3, 0.8}) CHECK(m.v_inverse(m.v(x)) == doctest::Approx(x).epsilon(1e-10));
  }

  const auto fm = ConjugationMap::feller();
  CHECK(pi0_conjugated(0.0, fm, 1.0, 1.0 / 16, 0.0, 0.25) == doctest::Approx(1.0));
  CHECK(pi0_conjugated(0.25, fm, 1.0, 1.0 / 16, 0.0, 0.25) == doctest::Approx(0.0));
  CHECK(pi0_conjugated(1.0 / 16, fm, 1.0, 1.0 / 16, 0.0, 0.25) == doctest::Approx(0.5));
  CHECK(pi0_conjugated(0.1, fm, 1.3, 0.05, 0.0, 0.25) ==
        pi0_bm(fm.v(0.1), 0.0, 1.3, fm.v(0.05), fm.v(0.25)));
}
