#pragma once

#include <functional>

namespace resetfpt {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
};

struct QuadOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  int max_depth = 40;
  int max_intervals = 4000;
  // Throw QuadratureError instead of returning a result above tolerance.
  bool strict = true;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite [a, b].
/// The interval with the largest error estimate is bisected until the
/// summed estimate meets max(abs_tol, rel_tol * |I|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts = {});

/// Single G7/K15 panel; exposed for tests.
QuadResult gauss_kronrod_15(const std::function<double(double)>& f, double a, double b);

}  // namespace resetfpt
