#include "resetfpt/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "resetfpt/errors.hpp"

namespace resetfpt {
namespace {

using cplx = std::complex<double>;

constexpr double kQuantileTail = 1e-12;
// Closed forms carry e^{d2 b}; beyond this exponent they are not assembled.
constexpr double kClosedExpCeiling = 700.0;

// Breakpoints of a continuous law: support ends plus interior kinks.
std::vector<double> breakpoints(const DensityFamily& law) {
  const Support s = law.support();
  const double hi = s.bounded() ? s.hi : law.upper_quantile(kQuantileTail);
  std::vector<double> pts{s.lo};
  if (law.kind() == FamilyKind::Triangular) pts.push_back(0.5);
  pts.push_back(hi);
  return pts;
}

// Integral of f(x) pdf(x) over [a, c] after x = a + (c - a)(3t^2 - 2t^3),
// whose Jacobian vanishes at both ends and absorbs power-law endpoint
// behaviour of the density.
template <class Part>
QuadResult smooth_segment(const DensityFamily& law, Part part, double a, double c,
                          const QuadOptions& opts) {
  const double w = c - a;
  return integrate(
      [&](double t) {
        const double x = a + w * t * t * (3.0 - 2.0 * t);
        if (!(x > a && x < c)) return 0.0;
        const double dens = law.pdf(x);
        if (dens == 0.0) return 0.0;
        return part(x) * dens * 6.0 * w * t * (1.0 - t);
      },
      0.0, 1.0, opts);
}

void require_support(const DensityFamily& law, double lo, double hi, bool open_atoms,
                     const char* who) {
  const Support s = law.support();
  bool ok = s.lo >= lo && s.hi <= hi;
  if (ok && law.is_discrete() && open_atoms) {
    for (const Atom& a : law.atoms()) ok = ok && a.x > lo && a.x < hi;
  }
  if (!ok) {
    std::ostringstream os;
    os << who << ": support [" << s.lo << ", " << s.hi << "] of " << to_string(law.kind())
       << " must lie in " << (open_atoms ? "(" : "[") << lo << ", " << hi
       << (open_atoms ? ")" : "]");
    throw DomainError(os.str());
  }
}

void require_rate(double r, const char* who) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError(std::string(who) + ": reset rate must be finite and >= 0");
  }
}

void require_interval(double b, const char* who) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError(std::string(who) + ": interval end b must be positive and finite");
  }
}

Estimate closed(double value, double scale) {
  Estimate e;
  e.value = value;
  e.std_error = 1e-15 * std::max(1.0, scale);
  e.method = EstimateMethod::Analytic;
  return e;
}

Estimate from_quadrature(const QuadResult& q, double factor = 1.0, double offset = 0.0) {
  Estimate e;
  e.value = offset + factor * q.value;
  e.std_error = std::abs(factor) * q.abs_error;
  e.n_effective = static_cast<std::size_t>(q.evaluations);
  e.method = EstimateMethod::Quadrature;
  return e;
}

bool use_closed(Route route, bool available, const char* who) {
  if (route == Route::ClosedForm && !available) {
    throw DomainError(std::string(who) + ": closed form unavailable (exponent overflow)");
  }
  return route != Route::Quadrature && available;
}

}  // namespace

const char* to_string(Route route) {
  switch (route) {
    case Route::Auto: return "auto";
    case Route::ClosedForm: return "closed-form";
    case Route::Quadrature: return "quadrature";
  }
  return "unknown";
}

Route route_from_string(const std::string& name) {
  if (name == "auto") return Route::Auto;
  if (name == "closed-form") return Route::ClosedForm;
  if (name == "quadrature") return Route::Quadrature;
  throw ConfigError("unknown route '" + name + "' (auto, closed-form, quadrature)");
}

QuadResult mixture_integral(const DensityFamily& law, const std::function<double(double)>& f,
                            const QuadOptions& opts, double tail_bound) {
  QuadResult out;
  if (law.is_discrete()) {
    for (const Atom& a : law.atoms()) out.value += a.weight * f(a.x);
    out.evaluations = static_cast<int>(law.atoms().size());
    out.abs_error = 1e-15 * std::abs(out.value);
    return out;
  }
  const auto pts = breakpoints(law);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const QuadResult seg = smooth_segment(law, f, pts[i], pts[i + 1], opts);
    out.value += seg.value;
    out.abs_error += seg.abs_error;
    out.evaluations += seg.evaluations;
  }
  if (!law.support().bounded()) out.abs_error += tail_bound * kQuantileTail;
  return out;
}

cplx mixture_integral_complex(const DensityFamily& law, const std::function<cplx(double)>& f,
                              const QuadOptions& opts) {
  if (law.is_discrete()) {
    cplx acc = 0.0;
    for (const Atom& a : law.atoms()) acc += a.weight * f(a.x);
    return acc;
  }
  const auto pts = breakpoints(law);
  cplx acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double re =
        smooth_segment(law, [&](double x) { return f(x).real(); }, pts[i], pts[i + 1], opts).value;
    const double im =
        smooth_segment(law, [&](double x) { return f(x).imag(); }, pts[i], pts[i + 1], opts).value;
    acc += cplx(re, im);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Case I

Estimate q_case1(const DensityFamily& g, double mu, double r, double x_reset, double b,
                 Route route) {
  require_rate(r, "q_case1");
  require_interval(b, "q_case1");
  require_support(g, 0.0, b, false, "q_case1");
  if (r == 0.0) {
    if (route != Route::Quadrature) {
      if (std::abs(mu) < 1e-7) {
        // E[(1 - eta / b)(1 - mu eta)]
        const double m1 = g.mean();
        const double m2 = g.variance() + m1 * m1;
        return closed(1.0 - m1 / b - mu * m1 + mu * m2 / b, 1.0);
      }
      // E[(e^{-2 mu eta} - e^{-2 mu b}) / (1 - e^{-2 mu b})]
      const double em = std::expm1(-2.0 * mu * b);
      return closed(((g.laplace(2.0 * mu) - 1.0) - em) / -em, 1.0);
    }
    return from_quadrature(
        mixture_integral(g, [&](double x) { return pi0_classical(x, mu, b); }));
  }
  const BmResetCoefficients c = bm_coefficients(mu, r, x_reset, b);
  if (use_closed(route, c.d2 * b <= kClosedExpCeiling, "q_case1")) {
    const double t1 = c.c1 * (g.laplace(-c.d1) - std::exp(c.d1 * b));
    const double t2 = c.c2 * g.laplace(-c.d2) - c.c2 * std::exp(c.d2 * b);
    return closed(std::clamp(t1 + t2, 0.0, 1.0), std::abs(t1) + std::abs(c.c2 * std::exp(c.d2 * b)));
  }
  return from_quadrature(
      mixture_integral(g, [&](double x) { return pi0_bm(x, mu, r, x_reset, b); }));
}

Estimate q_case1_general(const DensityFamily& g, const DiffusionModel& model, double r,
                         double x_reset, double lo, double hi, const BvpOptions& opts) {
  require_support(g, lo, hi, false, "q_case1_general");
  const BvpSolution sol = bvp_solve(model, lo, hi, r, x_reset, BvpTarget::ExitProbability, opts);
  Estimate e = from_quadrature(
      mixture_integral(g, [&](double x) { return std::clamp(sol(x), 0.0, 1.0); },
                       QuadOptions{1e-9, 1e-14, 40, 4000, false}));
  e.std_error += sol.refinement_change;
  return e;
}

Estimate q_case1_conjugated(const DensityFamily& base, const ConjugationMap& map, double r,
                            double x_reset, double lo, double hi, Route route) {
  if (!(lo < hi) || !(x_reset > lo && x_reset < hi)) {
    throw DomainError("q_case1_conjugated: need lo < x_R < hi");
  }
  const double shift = map.v(lo);
  return q_case1(base, map.drift, r, map.v(x_reset) - shift, map.v(hi) - shift, route);
}

Estimate fpt_lt_case1(double lambda, const DensityFamily& g, double mu, double r, double x_reset,
                      Route route) {
  require_rate(r, "fpt_lt_case1");
  if (!(x_reset >= 0.0)) throw DomainError("fpt_lt_case1: x_R must be >= 0");
  require_support(g, 0.0, std::numeric_limits<double>::infinity(), false, "fpt_lt_case1");
  if (std::isnan(lambda) || mu * mu + 2.0 * (lambda + r) < 0.0) {
    throw DomainError("fpt_lt_case1: lambda below the convergence abscissa");
  }
  if (lambda == 0.0 && r > 0.0) return closed(1.0, 1.0);
  if (use_closed(route, true, "fpt_lt_case1")) {
    const double k = passage_exponent(mu, lambda + r);
    const double ghat = g.laplace(k);
    if (r == 0.0) return closed(ghat, 1.0);
    const double e = r * std::exp(-x_reset * k);
    const double one_minus_c = lambda / (lambda + e);
    return closed(1.0 - one_minus_c * (1.0 - ghat), 1.0);
  }
  return from_quadrature(mixture_integral(
      g, [&](double x) { return fpt_lt_bm(lambda, x, mu, r, x_reset); }, {}, 1.0));
}

cplx fpt_lt_case1(cplx lambda, const DensityFamily& g, double mu, double r, double x_reset) {
  require_rate(r, "fpt_lt_case1");
  const cplx k = passage_exponent(mu, lambda + r);
  const cplx ghat = g.laplace(k);
  if (r == 0.0) return ghat;
  const cplx e = r * std::exp(-x_reset * k);
  return 1.0 - lambda / (lambda + e) * (1.0 - ghat);
}

Estimate mean_fpt_case1(const DensityFamily& g, double mu, double r, double x_reset, Route route) {
  require_rate(r, "mean_fpt_case1");
  require_support(g, 0.0, std::numeric_limits<double>::infinity(), false, "mean_fpt_case1");
  if (r == 0.0) {
    if (!(mu < 0.0)) throw DomainError("mean_fpt_case1: without resetting the mean is infinite unless mu < 0");
    return closed(g.mean() / -mu, 1.0);
  }
  if (!(x_reset >= 0.0)) throw DomainError("mean_fpt_case1: x_R must be >= 0");
  const double k = passage_exponent(mu, r);
  const double cap = std::exp(x_reset * k) / r;
  if (use_closed(route, true, "mean_fpt_case1")) return closed(cap * (1.0 - g.laplace(k)), cap);
  return from_quadrature(mixture_integral(
      g, [&](double x) { return mean_fpt_bm(x, mu, r, x_reset); }, {}, cap));
}

Estimate mean_fet_case1(const DensityFamily& g, double mu, double r, double x_reset, double b,
                        Route route) {
  require_rate(r, "mean_fet_case1");
  require_interval(b, "mean_fet_case1");
  require_support(g, 0.0, b, false, "mean_fet_case1");
  const BmResetCoefficients c = bm_coefficients(mu, r, x_reset, b);
  if (use_closed(route, c.d2 * b <= kClosedExpCeiling, "mean_fet_case1")) {
    const double t1 = c.C1 * (g.laplace(-c.d1) - 1.0);
    const double t2 = c.C2 * (g.laplace(-c.d2) - 1.0);
    return closed(std::max(t1 + t2, 0.0), std::abs(t1) + std::abs(t2));
  }
  return from_quadrature(
      mixture_integral(g, [&](double x) { return mean_fet_bm(x, mu, r, x_reset, b); }));
}

// ---------------------------------------------------------------------------
// Case II

Estimate q_case2(const DensityFamily& h, double x, double mu, double r, double b) {
  require_rate(r, "q_case2");
  require_interval(b, "q_case2");
  if (!(x >= 0.0 && x <= b)) throw DomainError("q_case2: x must lie in [0, b]");
  require_support(h, 0.0, b, true, "q_case2");
  if (r == 0.0) return closed(pi0_classical(x, mu, b), 1.0);
  return from_quadrature(mixture_integral(h, [&](double u) { return pi0_bm(x, mu, r, u, b); }));
}

Estimate fpt_lt_case2(double lambda, const DensityFamily& h, double x, double mu, double r) {
  require_rate(r, "fpt_lt_case2");
  if (!(x >= 0.0)) throw DomainError("fpt_lt_case2: x must be >= 0");
  require_support(h, 0.0, std::numeric_limits<double>::infinity(), false, "fpt_lt_case2");
  if (std::isnan(lambda) || mu * mu + 2.0 * (lambda + r) < 0.0) {
    throw DomainError("fpt_lt_case2: lambda below the convergence abscissa");
  }
  if ((lambda == 0.0 && r > 0.0) || x == 0.0) return closed(1.0, 1.0);
  const double k = passage_exponent(mu, lambda + r);
  const double direct = std::exp(-x * k);
  if (r == 0.0) return closed(direct, 1.0);
  const QuadResult q = mixture_integral(
      h,
      [&](double u) {
        const double e = r * std::exp(-u * k);
        return e / (lambda + e);
      },
      {}, 1.0);
  return from_quadrature(q, -std::expm1(-x * k), direct);
}

cplx fpt_lt_case2(cplx lambda, const DensityFamily& h, double x, double mu, double r) {
  require_rate(r, "fpt_lt_case2");
  const cplx k = passage_exponent(mu, lambda + r);
  const cplx direct = std::exp(-x * k);
  if (r == 0.0) return direct;
  const cplx mix = mixture_integral_complex(
      h,
      [&](double u) -> cplx {
        const cplx e = r * std::exp(-u * k);
        return e / (lambda + e);
      },
      QuadOptions{});
  return direct + (1.0 - direct) * mix;
}

Estimate mean_fpt_case2(const DensityFamily& h, double x, double mu, double r, Route route) {
  require_rate(r, "mean_fpt_case2");
  if (r == 0.0) throw DomainError("mean_fpt_case2: requires r > 0");
  if (!(x >= 0.0)) throw DomainError("mean_fpt_case2: x must be >= 0");
  require_support(h, 0.0, std::numeric_limits<double>::infinity(), false, "mean_fpt_case2");
  const double k = passage_exponent(mu, r);
  if (!(-k > h.laplace_lower_bound())) {
    std::ostringstream os;
    os << "mean_fpt_case2: E[exp(" << k << " x_R)] diverges for " << to_string(h.kind());
    throw DomainError(os.str());
  }
  const double front = -std::expm1(-x * k) / r;
  if (use_closed(route, true, "mean_fpt_case2")) {
    const double mgf = h.laplace(-k);
    return closed(front * mgf, front * mgf);
  }
  return from_quadrature(
      mixture_integral(h, [&](double u) { return mean_fpt_bm(x, mu, r, u); }));
}

Estimate mean_fet_case2(const DensityFamily& h, double x, double mu, double r, double b) {
  require_rate(r, "mean_fet_case2");
  if (r == 0.0) throw DomainError("mean_fet_case2: requires r > 0");
  require_interval(b, "mean_fet_case2");
  if (!(x >= 0.0 && x <= b)) throw DomainError("mean_fet_case2: x must lie in [0, b]");
  require_support(h, 0.0, b, true, "mean_fet_case2");
  return from_quadrature(
      mixture_integral(h, [&](double u) { return mean_fet_bm(x, mu, r, u, b); }));
}

}  // namespace resetfpt
