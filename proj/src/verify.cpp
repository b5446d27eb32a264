#include "resetfpt/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "resetfpt/errors.hpp"
#include "resetfpt/forward.hpp"
#include "resetfpt/inverse.hpp"
#include "resetfpt/laplace.hpp"

namespace resetfpt {
namespace {

// Targets below are written from the closed-form displays, independently of
// the forward module; the solvers then have to recover the stated law.

constexpr double kParamTol = 1e-6;
constexpr double kResidualTol = 1e-10;

struct Exponents {
  double d1;
  double d2;
};

Exponents exponents(double mu, double r) {
  const double s = std::sqrt(mu * mu + 2.0 * r);
  return {-mu - s, -mu + s};
}

// c1, c2 of pi0(x) = c1 (e^{d1 x} - e^{d1 b}) + c2 (e^{d2 x} - e^{d2 b}).
std::pair<double, double> pi0_constants(double mu, double r, double x_reset, double b) {
  const auto [d1, d2] = exponents(mu, r);
  const double e = std::exp(x_reset * (d1 - d2));
  const double c1 = 1.0 / (1.0 - std::exp(d1 * b) - e * (1.0 - std::exp(d2 * b)));
  return {c1, -c1 * e};
}

// C1, C2 of E[tau_{0,b}(x)] = C1 (e^{d1 x} - 1) + C2 (e^{d2 x} - 1).
std::pair<double, double> fet_constants(double mu, double r, double x_reset, double b) {
  const auto [d1, d2] = exponents(mu, r);
  const double den = 1.0 - std::exp(d1 * b) - std::exp(x_reset * (d1 - d2)) * (1.0 - std::exp(d2 * b));
  const double k = std::exp(-d2 * x_reset) / (r * den);
  return {k * (1.0 - std::exp(d2 * b)), -k * (1.0 - std::exp(d1 * b))};
}

// E[e^{t eta}] for Beta(alpha, beta) from its power series, from term `from` on.
double beta_mgf_series(double t, double alpha, double beta, int from = 0) {
  double sum = 0.0;
  double term = 1.0;  // t^k / k! * B(alpha + k, beta) / B(alpha, beta)
  for (int k = 0; k < 400; ++k) {
    if (k >= from) sum += term;
    term *= t / (k + 1) * (alpha + k) / (alpha + beta + k);
    if (k > 4 && std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
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

InverseSetting reset_setting(double x, double r, double b = 1.0) {
  InverseSetting s;
  s.which = InverseCase::RandomReset;
  s.x = x;
  s.r = r;
  s.b = b;
  return s;
}

VerifyCheck make_check(std::string label, double expected, double computed, double tol, bool relative) {
  VerifyCheck c{std::move(label), expected, computed, tol, relative, false};
  const double diff = std::abs(computed - expected);
  c.pass = std::isfinite(computed) && (relative ? diff <= tol * std::abs(expected) : diff <= tol);
  return c;
}

double fitted_value(const InverseSolution& s, const std::string& name) {
  for (const auto& [n, v] : s.fitted) {
    if (n == name) return v;
  }
  throw DomainError("parameter '" + name + "' was not fitted");
}

void param_check(VerifyCase& c, const std::string& label, const InverseSolution& s, const std::string& name,
                 double expected) {
  c.checks.push_back(make_check(label + " " + name, expected, fitted_value(s, name), kParamTol, true));
}

// Fixed families: the selected candidate must be the stated one and reach the target.
void fixed_check(VerifyCase& c, const std::string& label, const InverseSolution& s, const DensityFamily& stated) {
  c.checks.push_back(make_check(label + " selected", 1.0, s.family == stated ? 1.0 : 0.0, 0.0, false));
  const double residual = std::isfinite(s.replay) ? std::abs(s.replay - s.target) : s.residual;
  c.checks.push_back(make_check(label + " residual", 0.0, residual, kResidualTol, false));
}

SearchSpace free_param(const DensityFamily& start, const std::string& name, double lo, double hi) {
  return SearchSpace::parametric(start, {name}, Box{{lo}, {hi}});
}

// ---------------------------------------------------------------------------
// Case I, exit place

void ex2_1(VerifyCase& c) {
  {
    // (i) drifted BM, Beta(alpha, beta) through its moment generating series.
    const double mu = 0.5, r = 1.0, xr = 0.4, alpha = 2.5, beta = 1.5;
    const auto [d1, d2] = exponents(mu, r);
    const auto [c1, c2] = pi0_constants(mu, r, xr, 1.0);
    const double q = c1 * beta_mgf_series(d1, alpha, beta) + c2 * beta_mgf_series(d2, alpha, beta) -
                     c1 * std::exp(d1) - c2 * std::exp(d2);
    const auto s = solve_ifpp(q, initial(mu, r, xr), free_param(DensityFamily::beta(1.0, beta), "alpha", 0.2, 10.0));
    param_check(c, "(i) beta", s, "alpha", alpha);
  }
  {
    // (i) mu = 0, alpha = beta = 2 display.
    const double r = 1.0, xr = 0.5;
    const auto [d1, d2] = exponents(0.0, r);
    const auto [c1, c2] = pi0_constants(0.0, r, xr, 1.0);
    auto part = [](double d) {
      return (d + 2.0) / (d * d * d) + std::exp(d) * (-1.0 / 6.0 + 1.0 / (d * d) - 2.0 / (d * d * d));
    };
    const double q = 6.0 * (c1 * part(d1) + c2 * part(d2));
    const auto t = solve_ifpp(q, initial(0.0, r, xr), free_param(DensityFamily::beta(2.0, 1.0), "beta", 0.2, 10.0));
    param_check(c, "(i) 6x(1-x)", t, "beta", 2.0);
  }
  {
    // (i) uniform law, mu = 0.
    const double r = 1.0, xr = 0.25;
    const auto [d1, d2] = exponents(0.0, r);
    const auto [c1, c2] = pi0_constants(0.0, r, xr, 1.0);
    const double q = c1 * (std::expm1(d1) / d1 - std::exp(d1)) + c2 * (std::expm1(d2) / d2 - std::exp(d2));
    const auto u = DensityFamily::uniform(0.0, 1.0);
    const auto s = solve_ifpp(q, initial(0.0, r, xr),
                              SearchSpace::candidates({DensityFamily::triangular(), u, DensityFamily::beta(2.0, 2.0)}));
    fixed_check(c, "(i) uniform", s, u);
  }
  {
    // (ii) triangular law, E[e^{t eta}] = 4 (e^{t/2} - 1)^2 / t^2.
    const double mu = -0.3, r = 2.0, xr = 0.6;
    const auto [d1, d2] = exponents(mu, r);
    const auto [c1, c2] = pi0_constants(mu, r, xr, 1.0);
    auto z = [](double t) { return 4.0 / (t * t) * std::pow(std::expm1(t / 2.0), 2); };
    const double q = c1 * (z(d1) - std::exp(d1)) + c2 * (z(d2) - std::exp(d2));
    const auto tri = DensityFamily::triangular();
    const auto s = solve_ifpp(q, initial(mu, r, xr),
                              SearchSpace::candidates({DensityFamily::uniform(0.0, 1.0), tri, DensityFamily::beta(2.0, 2.0)}));
    fixed_check(c, "(ii) triangular", s, tri);
  }
  {
    // (iii) truncated exponential on (0, 1), mu = 0.
    const double r = 1.5, xr = 0.6, theta = 2.2;
    const double s2r = std::sqrt(2.0 * r);
    const auto [c1, c2] = pi0_constants(0.0, r, xr, 1.0);
    const double et = std::exp(theta);
    const double q = c1 * (theta * (et - std::exp(-s2r)) / ((et - 1.0) * (theta + s2r)) - std::exp(-s2r)) +
                     c2 * (theta * (et - std::exp(s2r)) / ((et - 1.0) * (theta - s2r)) - std::exp(s2r));
    const auto s = solve_ifpp(q, initial(0.0, r, xr),
                              free_param(DensityFamily::truncated_exponential(1.0, 1.0), "theta", 0.05, 20.0));
    param_check(c, "(iii) truncated exponential", s, "theta", theta);
  }
  {
    // (iv) linear law a1 x + a0 with a1 / 2 + a0 = 1.
    const double mu = 0.7, r = 1.0, xr = 0.35, a1 = 0.8, a0 = 1.0 - a1 / 2.0;
    const auto [d1, d2] = exponents(mu, r);
    const auto [c1, c2] = pi0_constants(mu, r, xr, 1.0);
    auto mgf = [&](double d) { return a1 * (std::exp(d) * (d - 1.0) + 1.0) / (d * d) + a0 * std::expm1(d) / d; };
    const double q = c1 * (mgf(d1) - std::exp(d1)) + c2 * (mgf(d2) - std::exp(d2));
    const auto lin = ifpp_linear_closed_form(q, mu, r, xr);
    c.checks.push_back(make_check("(iv) closed form a1", a1, lin.a1, kParamTol, true));
    c.checks.push_back(make_check("(iv) closed form a0", a0, lin.a0, kParamTol, true));
    const auto s = solve_ifpp(q, initial(mu, r, xr), free_param(DensityFamily::linear(0.0, 1.0), "a1", -2.0, 2.0));
    param_check(c, "(iv) linear", s, "a1", a1);
  }
}

void ex2_3(VerifyCase& c) {
  {
    // (i) drift r (x - x_R) makes pi0 = 1 - x / b for any sigma; q = beta / (alpha + beta).
    const double r = 1.0, xr = 0.7, b = 2.0, alpha = 2.0, beta = 3.0;
    InverseSetting st = initial(0.0, r, xr, b);
    st.model = DiffusionModel::custom([=](double x) { return r * (x - xr); },
                                      [](double x) { return 1.0 + x / 2.0; }, "r (x - x_R), 1 + x / 2");
    const auto s = solve_ifpp(beta / (alpha + beta), st,
                              free_param(DensityFamily::scaled_beta(1.0, beta, b), "alpha", 0.2, 10.0));
    param_check(c, "(i) scaled beta", s, "alpha", alpha);
  }
  {
    // (ii) drift A - B / 2^x with sigma = 1 makes pi0 = 2 - 2^x on (0, 1).
    const double r = 1.0, xr = 0.5, sigma = 1.0, alpha = 1.5, beta = 2.5;
    const double ln2 = std::log(2.0);
    const double a = r / ln2 - ln2 / 2.0 * sigma * sigma;
    const double bb = r / ln2 * std::pow(2.0, xr);
    InverseSetting st = initial(0.0, r, xr, 1.0);
    st.model = DiffusionModel::custom([=](double x) { return a - bb * std::pow(2.0, -x); },
                                      [=](double) { return sigma; }, "A - B 2^-x, 1");
    const double q = 1.0 - beta_mgf_series(ln2, alpha, beta, 1);
    const auto s = solve_ifpp(q, st, free_param(DensityFamily::beta(1.0, beta), "alpha", 0.2, 10.0));
    param_check(c, "(ii) beta", s, "alpha", alpha);
  }
}

void ex2_5(VerifyCase& c) {
  const double r = 1.0, xr = 0.5, b = 1.0, x1 = 0.35;
  const double s2r = std::sqrt(2.0 * r);
  const auto [c1, c2] = pi0_constants(0.0, r, xr, b);
  const double q = c1 / 3.0 * (1.0 + std::exp(-x1 * s2r) - 2.0 * std::exp(-b * s2r)) +
                   c2 / 3.0 * (1.0 + std::exp(x1 * s2r) - 2.0 * std::exp(b * s2r));
  const auto s = solve_ifpp(q, initial(0.0, r, xr, b),
                            free_param(DensityFamily::discrete_uniform({0.0, 0.5, b}), "point1", 0.01, 0.99));
  param_check(c, "discrete uniform {0, x1, b}", s, "point1", x1);
}

void ex2_6(VerifyCase& c) {
  const int n = 3;
  const double r = 0.8, xr = 1.4, p = 0.37;
  const double s2r = std::sqrt(2.0 * r);
  const auto [c1, c2] = pi0_constants(0.0, r, xr, n);
  const double q = c1 * (std::pow(1.0 - p + p * std::exp(-s2r), n) - std::exp(-n * s2r)) +
                   c2 * (std::pow(1.0 - p + p * std::exp(s2r), n) - std::exp(n * s2r));
  const auto s = solve_ifpp(q, initial(0.0, r, xr, n), free_param(DensityFamily::binomial(n, 0.5), "p", 0.01, 0.99));
  param_check(c, "binomial", s, "p", p);
}

void ex2_7(VerifyCase& c) {
  // Feller process, v(x) = 2 sqrt(x), v(b) = 1 at b = 1/4; the law is Beta on the v-scale.
  const double r = 1.0, xr = 0.1, b = 0.25, alpha = 2.5, beta = 1.5;
  const double s2r = std::sqrt(2.0 * r);
  const double vr = 2.0 * std::sqrt(xr);
  const double cb1 = 1.0 / (1.0 - std::exp(-s2r) - std::exp(-2.0 * vr * s2r) * (1.0 - std::exp(s2r)));
  const double cb2 = -cb1 * std::exp(-2.0 * vr * s2r);
  InverseSetting st = initial(0.0, r, xr, b);
  st.conjugation = ConjugationMap::feller();
  {
    const double q = cb1 * beta_mgf_series(-s2r, alpha, beta) + cb2 * beta_mgf_series(s2r, alpha, beta) -
                     cb1 * std::exp(-s2r) - cb2 * std::exp(s2r);
    const auto s = solve_ifpp(q, st, free_param(DensityFamily::beta(1.0, beta), "alpha", 0.2, 10.0));
    param_check(c, "transformed beta", s, "alpha", alpha);
  }
  {
    const double q = cb1 * (-(std::exp(-s2r) - 1.0) / s2r - std::exp(-s2r)) +
                     cb2 * ((std::exp(s2r) - 1.0) / s2r - std::exp(s2r));
    const auto u = DensityFamily::uniform(0.0, 1.0);
    const auto s = solve_ifpp(q, st, SearchSpace::candidates({DensityFamily::beta(2.0, 2.0), u}));
    fixed_check(c, "transformed uniform", s, u);
  }
}

void remark2_3(VerifyCase& c) {
  // pi0 = 1 - x, so every law symmetric about 1/2 gives q = 1/2.
  const double r = 1.0, xr = 0.3, q = 0.3;
  InverseSetting st = initial(0.0, r, xr);
  st.model = DiffusionModel::custom([=](double x) { return r * (x - xr); }, [](double) { return 1.0; },
                                    "r (x - x_R), 1");
  const auto space = SearchSpace::parametric(DensityFamily::beta(2.0, 2.0), {"alpha"}, Box{{1.0}, {20.0}},
                                             {{"beta", "alpha"}});
  const auto s = solve_ifpp(q, st, space);
  c.checks.push_back(make_check("no solution in class", 1.0,
                                s.status == SolutionStatus::NoSolutionInClass ? 1.0 : 0.0, 0.0, false));
  const bool has = s.certificate.has_value();
  c.checks.push_back(make_check("certificate range lo", 0.5, has ? s.certificate->lo : NAN, 1e-6, false));
  c.checks.push_back(make_check("certificate range hi", 0.5, has ? s.certificate->hi : NAN, 1e-6, false));
}

// ---------------------------------------------------------------------------
// Case I, passage time and means

double reset_weight(double lambda, double r, double xr) {
  const double k = r * std::exp(-xr * std::sqrt(2.0 * (lambda + r)));
  return k / (lambda + k);
}

void ex3_1(VerifyCase& c) {
  const double r = 1.0, xr = 1.0;
  {
    const double nu = 1.3;
    auto fhat = [=](double l) {
      const double s = std::sqrt(2.0 * (l + r));
      const double k = r * std::exp(-xr * s);
      return (l * nu / (nu + s) + k) / (l + k);
    };
    const auto s = solve_ifpt(FptLawSpec::from_transform(fhat), initial(0.0, r, xr),
                              free_param(DensityFamily::exponential(3.0), "theta", 0.05, 20.0));
    param_check(c, "exponential", s, "theta", nu);
  }
  {
    const double nu = 1.3, alpha = 1.8;
    auto fhat = [=](double l) {
      const double s = std::sqrt(2.0 * (l + r));
      const double k = r * std::exp(-xr * s);
      return (l * std::pow(nu / (nu + s), alpha) + k) / (l + k);
    };
    const auto s = solve_ifpt(FptLawSpec::from_transform(fhat), initial(0.0, r, xr),
                              free_param(DensityFamily::gamma(1.0, nu), "a", 0.2, 10.0));
    param_check(c, "gamma", s, "a", alpha);
  }
}

void ex3_2(VerifyCase& c) {
  const double r = 1.0, xr = 1.0, p = 0.35;
  auto fhat = [=](double l) {
    const double w = reset_weight(l, r, xr);
    return (1.0 - w) * p / (1.0 - (1.0 - p) * std::exp(-std::sqrt(2.0 * (l + r)))) + w;
  };
  const auto s = solve_ifpt(FptLawSpec::from_transform(fhat), initial(0.0, r, xr),
                            free_param(DensityFamily::geometric(0.5), "p", 0.01, 0.99));
  param_check(c, "geometric", s, "p", p);
}

void ex3_3(VerifyCase& c) {
  const double r = 1.0, xr = 1.0, nu = 2.3;
  auto fhat = [=](double l) {
    const double w = reset_weight(l, r, xr);
    return (1.0 - w) * std::exp(nu * std::expm1(-std::sqrt(2.0 * (l + r)))) + w;
  };
  const auto s = solve_ifpt(FptLawSpec::from_transform(fhat), initial(0.0, r, xr),
                            free_param(DensityFamily::poisson(1.0), "nu", 0.1, 10.0));
  param_check(c, "poisson", s, "nu", nu);
}

void ex3_4(VerifyCase& c) {
  const double mu = 0.3, r = 1.2, xr = 0.7;
  const double k = mu + std::sqrt(mu * mu + 2.0 * r);
  {
    const double a = 1.7, theta = 2.5;
    const double m = std::exp(xr * k) / r * (1.0 - std::pow(theta / (theta + k), a));
    const auto s = solve_imfpt(m, initial(mu, r, xr), free_param(DensityFamily::gamma(a, 1.0), "theta", 0.05, 50.0));
    param_check(c, "gamma", s, "theta", theta);
  }
  {
    const double theta = 1.8;
    const double m = std::exp(xr * k) / r * (1.0 - theta / (theta + k));
    const auto s = solve_imfpt(m, initial(mu, r, xr), free_param(DensityFamily::exponential(1.0), "theta", 0.05, 50.0));
    param_check(c, "exponential", s, "theta", theta);
  }
}

void ex3_5(VerifyCase& c) {
  {
    const double mu = -0.4, r = 1.0, xr = 0.5, alpha = 2.0, beta = 3.0;
    const auto [d1, d2] = exponents(mu, r);
    const auto [C1, C2] = fet_constants(mu, r, xr, 1.0);
    const double m = C1 * beta_mgf_series(d1, alpha, beta, 1) + C2 * beta_mgf_series(d2, alpha, beta, 1);
    const auto s = solve_imfet(m, initial(mu, r, xr), free_param(DensityFamily::beta(1.0, beta), "alpha", 0.2, 10.0));
    param_check(c, "beta", s, "alpha", alpha);
  }
  {
    const double r = 1.0, xr = 0.5;
    const auto [d1, d2] = exponents(0.0, r);
    const auto [C1, C2] = fet_constants(0.0, r, xr, 1.0);
    const double m = C1 * beta_mgf_series(d1, 1.0, 1.0, 1) + C2 * beta_mgf_series(d2, 1.0, 1.0, 1);
    const auto u = DensityFamily::uniform(0.0, 1.0);
    const auto s = solve_imfet(m, initial(0.0, r, xr), SearchSpace::candidates({DensityFamily::triangular(), u}));
    fixed_check(c, "uniform", s, u);
  }
}

void ex3_6(VerifyCase& c) {
  const int n = 3;
  const double r = 0.8, xr = 1.4, p = 0.37;
  const double s2r = std::sqrt(2.0 * r);
  const auto [C1, C2] = fet_constants(0.0, r, xr, n);
  const double m = C1 * (std::pow(1.0 - p + p * std::exp(-s2r), n) - 1.0) +
                   C2 * (std::pow(1.0 - p + p * std::exp(s2r), n) - 1.0);
  const auto s = solve_imfet(m, initial(0.0, r, xr, n), free_param(DensityFamily::binomial(n, 0.5), "p", 0.01, 0.99));
  param_check(c, "binomial", s, "p", p);
}

// ---------------------------------------------------------------------------
// Case II

void ex4_1(VerifyCase& c) {
  const double r = 1.0, x = 0.3;
  const double s = std::sqrt(2.0 * r);
  const double a = std::exp(-x * s) - std::exp(-s);
  const double b = std::exp(x * s) - std::exp(s);
  const double cc = 1.0 - std::exp(-s);
  const double d = 1.0 - std::exp(s);
  const double q = b / d + (a - b * cc / d) / (2.0 * s * cc) * std::log((cc * std::exp(2.0 * s) - d) / (cc - d));
  const auto u = DensityFamily::uniform(0.0, 1.0);
  const auto sol = solve_ifpp(q, reset_setting(x, r),
                              SearchSpace::candidates({DensityFamily::beta(2.0, 2.0), u, DensityFamily::triangular()}));
  fixed_check(c, "uniform reset", sol, u);
}

void ex4_2(VerifyCase& c) {
  const double r = 1.0, x = 0.8;
  auto fhat = [=](double l) {
    const double s = std::sqrt(2.0 * (l + r));
    const double e = std::exp(-x * s);
    return e + (1.0 - e) / (x * s) * std::log((l + r) / (l + r * e));
  };
  const auto s = solve_ifpt(FptLawSpec::from_transform(fhat), reset_setting(x, r),
                            free_param(DensityFamily::uniform(0.0, 0.5), "hi", 0.1, 3.0));
  param_check(c, "uniform reset", s, "hi", x);
}

void ex4_3(VerifyCase& c) {
  const double r = 1.0, x = 0.6;
  const double s2r = std::sqrt(2.0 * r);
  {
    const double a = 1.5, theta = 3.0;
    const double m = -std::expm1(-x * s2r) / r * std::pow(theta / (theta - s2r), a);
    const auto s = solve_imfpt(m, reset_setting(x, r), free_param(DensityFamily::gamma(a, 5.0), "theta", 1.5, 30.0));
    param_check(c, "gamma", s, "theta", theta);
  }
  {
    const double theta = 2.2;
    const double m = -std::expm1(-x * s2r) / r * theta / (theta - s2r);
    const auto s = solve_imfpt(m, reset_setting(x, r), free_param(DensityFamily::exponential(5.0), "theta", 1.5, 30.0));
    param_check(c, "exponential", s, "theta", theta);
  }
}

void ex4_4(VerifyCase& c) {
  const double r = 1.0, x = 0.7, theta = 2.5;
  const double s2r = std::sqrt(2.0 * r);
  const double m = theta / (r * (theta - s2r)) * (-std::expm1(-x * s2r)) * (-std::expm1(-x * (theta - s2r))) /
                   (-std::expm1(-theta * x));
  const auto s = solve_imfpt(m, reset_setting(x, r),
                             free_param(DensityFamily::truncated_exponential(1.0, x), "theta", 0.1, 10.0));
  param_check(c, "truncated exponential", s, "theta", theta);
}

void ex4_5(VerifyCase& c) {
  const double r = 1.0, x = 0.6;
  const double s2r = std::sqrt(2.0 * r);
  const double m = 2.0 / (r * x * s2r) * (std::cosh(x * s2r) - 1.0);
  const auto s = solve_imfpt(m, reset_setting(x, r), free_param(DensityFamily::uniform(0.0, 1.0), "hi", 0.1, 2.0));
  param_check(c, "uniform reset", s, "hi", x);
}

void ex4_6(VerifyCase& c) {
  const double r = 1.0, x = 0.3, b = 1.0;
  const double s = std::sqrt(2.0 * r);
  const double cb = 1.0 - std::exp(-b * s);
  const double db = 1.0 - std::exp(b * s);
  const double k = std::sqrt(-db / cb);
  const double pre = ((std::exp(-x * s) - 1.0) * (1.0 - std::exp(b * s)) -
                      (std::exp(x * s) - 1.0) * (1.0 - std::exp(-b * s))) / (r * b);
  const double m = pre / (s * std::sqrt(-cb * db)) * (std::atan(k) - std::atan(k * std::exp(-b * s)));
  const auto u = DensityFamily::uniform(0.0, b);
  const auto sol = solve_imfet(m, reset_setting(x, r, b),
                               SearchSpace::candidates({DensityFamily::beta(2.0, 2.0), u, DensityFamily::triangular()}));
  fixed_check(c, "uniform reset", sol, u);
}

// ---------------------------------------------------------------------------
// Printed numbers

void ex2_1_table(VerifyCase& c) {
  const std::pair<double, double> table[] = {{0.01, 0.568}, {0.125, 0.55}, {0.25, 0.538},
                                             {0.5, 0.5},    {0.75, 0.46},  {0.9, 0.441}};
  const auto u = DensityFamily::uniform(0.0, 1.0);
  for (const auto& [xr, printed] : table) {
    char label[32];
    std::snprintf(label, sizeof label, "q(%g)", xr);
    c.checks.push_back(make_check(label, printed, q_case1(u, 0.0, 1.0, xr, 1.0).value, 0.005, false));
  }
}

void ex3_1_moments(VerifyCase& c) {
  const double nu = 1.0, r = 1.0, xr = 1.0;
  auto fhat = [=](double l) {
    const double s = std::sqrt(2.0 * (l + r));
    const double k = r * std::exp(-xr * s);
    return (l * nu / (nu + s) + k) / (l + k);
  };
  const Moments m = moments_from_lt(fhat, 4);
  c.checks.push_back(make_check("mean", 2.41, m.raw[1], 0.01, false));
  c.checks.push_back(make_check("mu2", 9.61, m.central[2], 0.02, false));
  c.checks.push_back(make_check("mu3", -66.07, m.central[3], 0.1, false));
  c.checks.push_back(make_check("mu4", 485.81, m.central[4], 1.0, false));
  c.checks.push_back(make_check("gamma1", -2.217, m.skewness, 0.005, false));
  c.checks.push_back(make_check("gamma2", 2.26, m.excess_kurtosis, 0.01, false));
}

struct CaseDef {
  const char* id;
  const char* title;
  void (*run)(VerifyCase&);
};

const std::vector<CaseDef>& registry() {
  static const std::vector<CaseDef> cases = [] {
    std::vector<CaseDef> v = {
        {"ex2.1", "IFPP, drifted BM: beta, triangular, truncated exponential, linear", ex2_1},
        {"ex2.1-table", "printed q(x_R) table for the uniform law", ex2_1_table},
        {"ex2.3", "IFPP, diffusions built to give pi0 = 1 - x / b and 2 - 2^x", ex2_3},
        {"ex2.5", "IFPP, discrete uniform on {0, x1, b}", ex2_5},
        {"ex2.6", "IFPP, binomial on [0, n]", ex2_6},
        {"ex2.7", "IFPP, Feller process through its conjugation map", ex2_7},
        {"ex3.1", "IFPT, exponential and gamma initial laws", ex3_1},
        {"ex3.1-moments", "printed moments of the exponential-initial passage time", ex3_1_moments},
        {"ex3.2", "IFPT, geometric initial law", ex3_2},
        {"ex3.3", "IFPT, Poisson initial law", ex3_3},
        {"ex3.4", "IMFPT, gamma and exponential initial laws", ex3_4},
        {"ex3.5", "IMFET, beta and uniform initial laws", ex3_5},
        {"ex3.6", "IMFET, binomial initial law", ex3_6},
        {"ex4.1", "IFPP, uniform reset law", ex4_1},
        {"ex4.2", "IFPT, uniform reset law on (0, x)", ex4_2},
        {"ex4.3", "IMFPT, gamma and exponential reset laws", ex4_3},
        {"ex4.4", "IMFPT, truncated exponential reset law on (0, x)", ex4_4},
        {"ex4.5", "IMFPT, uniform reset law on (0, x)", ex4_5},
        {"ex4.6", "IMFET, uniform reset law on (0, b)", ex4_6},
        {"remark2.3", "IFPP non-existence in the symmetric class", remark2_3},
    };
    std::sort(v.begin(), v.end(), [](const CaseDef& a, const CaseDef& b) { return std::string(a.id) < b.id; });
    return v;
  }();
  return cases;
}

}  // namespace

bool VerifyCase::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

std::vector<std::string> verify_case_ids() {
  std::vector<std::string> ids;
  for (const auto& d : registry()) ids.emplace_back(d.id);
  return ids;
}

std::vector<VerifyCase> run_verify(const std::string& filter) {
  std::vector<VerifyCase> out;
  for (const auto& d : registry()) {
    const std::string id = d.id;
    if (id.compare(0, filter.size(), filter) != 0) continue;
    VerifyCase c;
    c.id = id;
    c.title = d.title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      d.run(c);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(c));
  }
  return out;
}

std::string verify_report(const std::vector<VerifyCase>& cases) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-34s %16s %16s %10s  %s\n", "case", "check", "expected", "computed",
                "tolerance", "result");
  os << line;
  int failed = 0;
  for (const auto& c : cases) {
    for (const auto& k : c.checks) {
      char tol[24];
      std::snprintf(tol, sizeof tol, "%.0e%s", k.tolerance, k.relative ? " rel" : "");
      std::snprintf(line, sizeof line, "%-14s %-34s %16.10g %16.10g %10s  %s\n", c.id.c_str(), k.label.c_str(),
                    k.expected, k.computed, tol, k.pass ? "pass" : "FAIL");
      os << line;
    }
    if (!c.error.empty()) os << c.id << "  error: " << c.error << "\n";
    if (!c.pass()) ++failed;
  }
  os << cases.size() - static_cast<std::size_t>(failed) << " of " << cases.size() << " cases passed\n";
  return os.str();
}

}  // namespace resetfpt
