#pragma once

#include <complex>
#include <functional>

#include "resetfpt/analytic.hpp"
#include "resetfpt/quadrature.hpp"
#include "resetfpt/types.hpp"

namespace resetfpt {

/// How a mixture functional is evaluated. Auto prefers the closed transform
/// route and falls back to quadrature where the closed form would overflow.
enum class Route { Auto, ClosedForm, Quadrature };

const char* to_string(Route route);
Route route_from_string(const std::string& name);

/// E[f(X)] for X ~ law. Discrete laws sum over atoms. Continuous laws are
/// integrated piecewise with a smoothstep substitution at every breakpoint;
/// half-line supports are cut at the 1 - 1e-12 quantile and `tail_bound`
/// (a bound on sup |f| beyond the cut, default 0) times 1e-12 is added to the
/// error estimate.
QuadResult mixture_integral(const DensityFamily& law, const std::function<double(double)>& f,
                            const QuadOptions& opts = {}, double tail_bound = 0.0);
std::complex<double> mixture_integral_complex(
    const DensityFamily& law, const std::function<std::complex<double>(double)>& f,
    const QuadOptions& opts = {});

// ---------------------------------------------------------------------------
// Case I: random initial position eta ~ g, fixed reset position x_R.

/// Exit probability through 0 from (0, b); r = 0 gives the classical value.
Estimate q_case1(const DensityFamily& g, double mu, double r, double x_reset, double b,
                 Route route = Route::Auto);

/// Exit probability for an arbitrary model, with pi0 from the nonlocal BVP.
/// The error estimate adds the quadrature error to the BVP refinement change;
/// the quadrature reports rather than throws when the interpolant's kinks stop it short.
Estimate q_case1_general(const DensityFamily& g, const DiffusionModel& model, double r,
                         double x_reset, double lo, double hi, const BvpOptions& opts = {});

/// Exit probability of a diffusion conjugated to BM through `map`, when the
/// law of v(eta) - v(lo) is `base` on the transformed scale.
Estimate q_case1_conjugated(const DensityFamily& base, const ConjugationMap& map, double r,
                            double x_reset, double lo, double hi, Route route = Route::Auto);

/// E[exp(-lambda tau)] for passage through 0.
Estimate fpt_lt_case1(double lambda, const DensityFamily& g, double mu, double r, double x_reset,
                      Route route = Route::Auto);
std::complex<double> fpt_lt_case1(std::complex<double> lambda, const DensityFamily& g, double mu,
                                  double r, double x_reset);

Estimate mean_fpt_case1(const DensityFamily& g, double mu, double r, double x_reset,
                        Route route = Route::Auto);

Estimate mean_fet_case1(const DensityFamily& g, double mu, double r, double x_reset, double b,
                        Route route = Route::Auto);

// ---------------------------------------------------------------------------
// Case II: fixed initial position x, random reset position x_R ~ h.

Estimate q_case2(const DensityFamily& h, double x, double mu, double r, double b);

Estimate fpt_lt_case2(double lambda, const DensityFamily& h, double x, double mu, double r);
std::complex<double> fpt_lt_case2(std::complex<double> lambda, const DensityFamily& h, double x,
                                  double mu, double r);

/// Closed route uses the moment generating function of h at mu + sqrt(mu^2 + 2r).
/// The quadrature route cuts half-line laws at a quantile, which misses the
/// exponentially tilted tail; Auto therefore always takes the closed route.
Estimate mean_fpt_case2(const DensityFamily& h, double x, double mu, double r,
                        Route route = Route::Auto);

Estimate mean_fet_case2(const DensityFamily& h, double x, double mu, double r, double b);

}  // namespace resetfpt
