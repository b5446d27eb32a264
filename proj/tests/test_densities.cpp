#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "doctest.h"
#include "resetfpt/densities.hpp"
#include "resetfpt/errors.hpp"
#include "resetfpt/quadrature.hpp"
#include "resetfpt/rng.hpp"

using namespace resetfpt;

namespace {

std::vector<DensityFamily> continuous_families() {
  return {DensityFamily::beta(2, 3),
          DensityFamily::beta(0.7, 1.4),
          DensityFamily::scaled_beta(2, 2, 3.0),
          DensityFamily::uniform(0.2, 1.7),
          DensityFamily::truncated_exponential(1.5, 2.0),
          DensityFamily::exponential(2.0),
          DensityFamily::gamma(2.5, 1.3),
          DensityFamily::triangular(),
          DensityFamily::linear(1.2, 0.4),
          DensityFamily::linear(-2.0, 2.0)};
}

std::vector<DensityFamily> discrete_families() {
  return {DensityFamily::discrete_uniform({0.0, 0.4, 1.0}), DensityFamily::binomial(5, 0.3),
          DensityFamily::geometric(0.35), DensityFamily::poisson(3.2),
          DensityFamily::point_mass(0.3)};
}

// Integral over [a, b] after x = a + (b - a)(3t^2 - 2t^3), which tames
// integrable power singularities at both ends.
double smooth_integral(const std::function<double(double)>& f, double a, double b,
                       const QuadOptions& opts) {
  return integrate(
             [&](double t) {
               const double x = a + (b - a) * t * t * (3.0 - 2.0 * t);
               return f(x) * (b - a) * 6.0 * t * (1.0 - t);
             },
             0.0, 1.0, opts)
      .value;
}

// Integral of pdf(x) * e^{-s x} over the support, cut at a far quantile when unbounded.
double integrate_against(const DensityFamily& d, double s) {
  const Support sup = d.support();
  const double hi = sup.bounded() ? sup.hi : d.upper_quantile(1e-17);
  QuadOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-15;
  // Split at the triangular kink and at 1 so each panel is smooth.
  std::vector<double> cuts = {sup.lo, hi};
  if (d.kind() == FamilyKind::Triangular) cuts = {0.0, 0.5, 1.0};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    acc += smooth_integral([&](double x) { return d.pdf(x) * std::exp(-s * x); }, cuts[i],
                           cuts[i + 1], opts);
  }
  return acc;
}

}  // namespace

TEST_CASE("pdf values") {
  CHECK(DensityFamily::uniform(0, 1).pdf(0.5) == doctest::Approx(1.0));
  CHECK(DensityFamily::beta(2, 2).pdf(0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(DensityFamily::truncated_exponential(1, 1).pdf(0.0) ==
        doctest::Approx(1.0 / (1.0 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(DensityFamily::beta(2, 2).pdf(-0.1) == 0.0);
  CHECK(DensityFamily::exponential(1).pdf(-1.0) == 0.0);
  CHECK(DensityFamily::poisson(2).pdf(1.5) == 0.0);
  CHECK(DensityFamily::point_mass(0.3).pdf(0.3) == 1.0);
}

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(DensityFamily::beta(0, 1), DomainError);
  CHECK_THROWS_AS(DensityFamily::uniform(1, 1), DomainError);
  CHECK_THROWS_AS(DensityFamily::gamma(1, -1), DomainError);
  CHECK_THROWS_AS(DensityFamily::binomial(0, 0.5), DomainError);
  CHECK_THROWS_AS(DensityFamily::geometric(1.0), DomainError);
  CHECK_THROWS_AS(DensityFamily::linear(3.0, -0.5), DomainError);
  CHECK_THROWS_AS(DensityFamily::linear(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(DensityFamily::discrete_uniform({}), DomainError);
}

TEST_CASE("continuous densities integrate to one") {
  for (const auto& d : continuous_families()) {
    INFO(to_string(d.kind()));
    CHECK(integrate_against(d, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("discrete pmfs sum to one") {
  for (const auto& d : discrete_families()) {
    INFO(to_string(d.kind()));
    double total = 0.0;
    for (const Atom& a : d.atoms()) total += a.weight;
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  // Raw pmf mass beyond the enumeration cut is below 1e-14.
  const auto pois = DensityFamily::poisson(3.2);
  double raw = 0.0;
  for (const Atom& a : pois.atoms()) raw += pois.pdf(a.x);
  CHECK(1.0 - raw < 1e-14);
}

TEST_CASE("laplace closed forms") {
  CHECK(DensityFamily::exponential(2).laplace(2) == doctest::Approx(0.5));
  CHECK(DensityFamily::binomial(3, 0.5).laplace(0) == 1.0);
  CHECK(DensityFamily::beta(1, 1).laplace(-std::log(2.0)) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
  // Truncated exponential transform in the form theta (e^theta - e^-s) / ((e^theta - 1)(theta + s)).
  const double theta = 1.3, s = 0.8;
  const double expected =
      theta * (std::exp(theta) - std::exp(-s)) / ((std::exp(theta) - 1.0) * (theta + s));
  CHECK(DensityFamily::truncated_exponential(theta, 1.0).laplace(s) ==
        doctest::Approx(expected).epsilon(1e-13));
  CHECK(DensityFamily::geometric(0.4).laplace(0.7) ==
        doctest::Approx(0.4 / (1.0 - 0.6 * std::exp(-0.7))).epsilon(1e-14));
  CHECK(DensityFamily::poisson(2.0).laplace(0.5) ==
        doctest::Approx(std::exp(2.0 * (std::exp(-0.5) - 1.0))).epsilon(1e-14));
  CHECK(DensityFamily::triangular().laplace(-2.0) ==
        doctest::Approx(std::pow(std::exp(1.0) - 1.0, 2.0)).epsilon(1e-13));
}

TEST_CASE("laplace is exactly one at zero") {
  for (const auto& d : continuous_families()) CHECK(d.laplace(0.0) == 1.0);
  for (const auto& d : discrete_families()) CHECK(d.laplace(0.0) == 1.0);
}

TEST_CASE("laplace outside the strip throws") {
  CHECK_THROWS_AS(DensityFamily::gamma(2, 1.5).laplace(-1.5), DomainError);
  CHECK_THROWS_AS(DensityFamily::exponential(1).laplace(-2.0), DomainError);
  CHECK_THROWS_AS(DensityFamily::geometric(0.5).laplace(std::log(0.5)), DomainError);
  CHECK_NOTHROW(DensityFamily::gamma(2, 1.5).laplace(-1.4));
}

TEST_CASE("laplace agrees with quadrature across the strip") {
  for (const auto& d : continuous_families()) {
    const double lb = std::max(d.laplace_lower_bound(), -20.0);
    for (double s : {-20.0, -5.0, -1.0, -0.3, 0.2, 1.0, 4.0, 15.0, 60.0}) {
      if (!(s > lb + 0.3)) continue;
      INFO(to_string(d.kind()) << " s=" << s);
      const double q = integrate_against(d, s);
      CHECK(std::abs(d.laplace(s) - q) <= 1e-8 * std::abs(q));
    }
  }
  for (const auto& d : discrete_families()) {
    for (double s : {-0.3, 0.2, 1.0, 4.0}) {
      if (!(s > d.laplace_lower_bound())) continue;
      double acc = 0.0;
      if (d.support().bounded()) {
        for (const Atom& a : d.atoms()) acc += a.weight * std::exp(-s * a.x);
      } else {
        // Direct pmf sum; the enumeration cut is too short when e^{-s x} grows.
        for (int k = 0; k < 1000; ++k) acc += d.pdf(k) * std::exp(-s * k);
      }
      INFO(to_string(d.kind()) << " s=" << s);
      CHECK(std::abs(d.laplace(s) - acc) <= 1e-8 * acc);
    }
  }
}

TEST_CASE("beta mgf stays accurate for large arguments") {
  const auto d = DensityFamily::beta(2.5, 1.5);
  for (double s : {-300.0, -120.0, 150.0, 400.0}) {
    INFO("s=" << s);
    const double q = integrate_against(d, s);
    CHECK(std::abs(d.laplace(s) - q) <= 1e-8 * std::abs(q));
  }
}

TEST_CASE("means") {
  CHECK(DensityFamily::scaled_beta(1, 1, 2).mean() == doctest::Approx(1.0));
  CHECK(DensityFamily::scaled_beta(2, 3, 1).mean() == doctest::Approx(0.4));
  CHECK(DensityFamily::poisson(3).mean() == doctest::Approx(3.0));
  for (const auto& d : continuous_families()) {
    INFO(to_string(d.kind()));
    const Support sup = d.support();
    const double hi = sup.bounded() ? sup.hi : d.upper_quantile(1e-17);
    QuadOptions opts;
    opts.rel_tol = 1e-12;
    std::vector<double> cuts = {sup.lo, hi};
    if (d.kind() == FamilyKind::Triangular) cuts = {0.0, 0.5, 1.0};
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      m1 += smooth_integral([&](double x) { return x * d.pdf(x); }, cuts[i], cuts[i + 1], opts);
      m2 += smooth_integral([&](double x) { return x * x * d.pdf(x); }, cuts[i], cuts[i + 1], opts);
    }
    CHECK(d.mean() == doctest::Approx(m1).epsilon(1e-9));
    CHECK(d.variance() == doctest::Approx(m2 - m1 * m1).epsilon(1e-8));
  }
}

TEST_CASE("sampling: point mass and moments") {
  PhiloxStream g(42, 0);
  const auto pm = DensityFamily::point_mass(0.3);
  for (int i = 0; i < 100; ++i) CHECK(pm.sample(g) == 0.3);

  constexpr int n = 1000000;
  for (const auto& d : {DensityFamily::uniform(0, 1), DensityFamily::gamma(2, 1),
                        DensityFamily::poisson(3), DensityFamily::geometric(0.3),
                        DensityFamily::binomial(6, 0.4)}) {
    PhiloxStream rng(7, 1);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = d.sample(rng);
      s1 += v;
      s2 += v * v;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    INFO(to_string(d.kind()));
    CHECK(std::abs(mean - d.mean()) < 4.0 * std::sqrt(d.variance() / n));
    // Standard error of the sample variance, bounded by 2 var / sqrt(n) for these laws' kurtosis.
    CHECK(std::abs(var - d.variance()) < 4.0 * 2.0 * d.variance() / std::sqrt(double(n)));
  }
}

TEST_CASE("sampling: Kolmogorov-Smirnov distance of continuous families") {
  constexpr int n = 1000000;
  std::vector<double> xs(n);
  for (const auto& d : continuous_families()) {
    PhiloxStream rng(2024, static_cast<std::uint64_t>(d.kind()));
    for (double& x : xs) x = d.sample(rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = d.cdf(xs[static_cast<std::size_t>(i)]);
      ks = std::max({ks, std::abs(c - double(i) / n), std::abs(c - double(i + 1) / n)});
    }
    INFO(to_string(d.kind()) << " KS=" << ks);
    CHECK(ks < 0.002);
  }
}

TEST_CASE("family kind names round trip") {
  for (const auto& d : continuous_families()) {
    CHECK(family_kind_from_string(to_string(d.kind())) == d.kind());
  }
  CHECK_THROWS_AS(family_kind_from_string("cauchy"), DomainError);
}

TEST_CASE("complex laplace matches direct integration") {
  const std::vector<std::complex<double>> args = {{0.5, 2.0}, {3.0, -7.5}, {0.05, 0.3}};
  QuadOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-15;
  for (const auto& d : continuous_families()) {
    CAPTURE(to_string(d.kind()));
    const Support sup = d.support();
    const double hi = sup.bounded() ? sup.hi : d.upper_quantile(1e-17);
    std::vector<double> cuts = {sup.lo, hi};
    if (d.kind() == FamilyKind::Triangular) cuts = {0.0, 0.5, 1.0};
    for (const auto& s : args) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double re = smooth_integral(
            [&](double x) { return d.pdf(x) * std::exp(-s.real() * x) * std::cos(s.imag() * x); },
            cuts[i], cuts[i + 1], opts);
        const double im = smooth_integral(
            [&](double x) { return -d.pdf(x) * std::exp(-s.real() * x) * std::sin(s.imag() * x); },
            cuts[i], cuts[i + 1], opts);
        acc += std::complex<double>(re, im);
      }
      CHECK(std::abs(d.laplace(s) - acc) < 1e-9 * std::max(1.0, std::abs(acc)));
    }
    CHECK(std::abs(d.laplace(std::complex<double>(0.7, 0.0)) - d.laplace(0.7)) == 0.0);
  }
  for (const auto& d : discrete_families()) {
    CAPTURE(to_string(d.kind()));
    for (const auto& s : args) {
      std::complex<double> acc = 0.0;
      for (const Atom& a : d.atoms()) acc += a.weight * std::exp(-s * a.x);
      CHECK(std::abs(d.laplace(s) - acc) < 1e-12);
    }
  }
  CHECK_THROWS_AS(DensityFamily::exponential(1.0).laplace(std::complex<double>(-2.0, 1.0)),
                  DomainError);
}
