#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace resetfpt {

using RealTransform = std::function<double(double)>;
using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;

/// Fixed-Talbot inversion at t > 0 with M nodes. In double precision the
/// error grows again beyond M of about 30.
double talbot_invert(const ComplexTransform& fhat, double t, int nodes = 24);

/// Gaver-Stehfest inversion at t > 0 with an even number of terms, weights
/// and sum accumulated in long double. Uses real arguments only.
double stehfest_invert(const RealTransform& fhat, double t, int terms = 18);

struct InversionOptions {
  int talbot_nodes = 24;
  int stehfest_terms = 18;
  // Negative values are clipped to 0; any below -clip_tolerance * max|f| fail the run.
  double clip_tolerance = 1e-6;
  // When set, |mass - 1| above `mass_tolerance` triggers the Stehfest fallback
  // and, if that also fails, an InversionError.
  bool check_mass = true;
  double mass_tolerance = 1e-2;
};

struct InversionResult {
  std::vector<double> t;
  std::vector<double> f;
  std::string method;          // "talbot" or "stehfest"
  double mass = 0.0;           // trapezoid integral of f over the grid
  double first_moment = 0.0;   // trapezoid integral of t f over the grid
  double clip_mass = 0.0;      // trapezoid integral of the clipped negative part
  double stehfest_gap = 0.0;   // max |talbot - stehfest| over the grid
};

/// Density values on a nondecreasing grid of t >= 0. A point at t = 0 takes
/// the initial-value limit s fhat(s) at large s. If that value is not finite, the first
/// panel of the mass and moment integrals uses the inverted distribution
/// function instead.
InversionResult laplace_invert(const ComplexTransform& fhat, const std::vector<double>& t,
                               const InversionOptions& opts = {});

struct MomentOptions {
  // Chebyshev degrees tried, in steps of 4.
  int min_degree = 8;
  int max_degree = 28;
  // Largest accepted change between successive degrees, relative to max(|m_k|, m_1^k).
  double rel_tol = 1e-6;
  // Use a window centred at 0 when fhat accepts small negative arguments.
  bool two_sided = false;
};

struct Moments {
  std::array<double, 5> raw{};      // m_0 .. m_4, m_0 = fhat(0)
  std::array<double, 5> central{};  // mu_0 .. mu_4
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double window = 0.0;              // half-width or width of the fitting window
  double consistency = 0.0;         // change between the two selected degrees
};

/// m_k = (-1)^k fhat^{(k)}(0) for k <= order from Chebyshev interpolants on
/// windows scaled to the mean. The window and degree with the smallest change
/// against the next lower degree are kept; NumericalError if that change
/// exceeds `rel_tol`.
Moments moments_from_lt(const RealTransform& fhat, int order = 4, const MomentOptions& opts = {});

}  // namespace resetfpt
