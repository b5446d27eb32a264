#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace resetfpt {

using Objective = std::function<double(const std::vector<double>&)>;

/// Closed box lo <= x <= hi; every coordinate must be finite.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t dim() const { return lo.size(); }
};

struct OptimOptions {
  int restarts = 20;
  int max_iterations = 4000;  // per Nelder-Mead run
  double f_tol = 1e-14;       // relative spread of simplex values
  double x_tol = 1e-12;       // simplex diameter relative to the box width
  std::uint64_t seed = 1;
  // Runs and restarts stop once the objective reaches this value; least
  // squares callers set a tiny positive floor.
  double stop_value = -std::numeric_limits<double>::infinity();
  bool refine = true;
};

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  int restarts_used = 0;
  // Finite-difference Hessian at x (row-major) and whether it is positive definite.
  std::vector<double> hessian;
  bool hessian_positive_definite = false;
};

/// Bounded Nelder-Mead (points projected onto the box) started from `start`
/// (default: box centre) and from seeded uniform restarts, followed by
/// Newton steps on a finite-difference quadratic model around the best point.
/// Throws OptimError when no run converges or the objective is never finite.
OptimResult minimize(const Objective& f, const Box& box, const OptimOptions& opts = {},
                     const std::optional<std::vector<double>>& start = std::nullopt);

/// Root of f on [a, b] by TOMS 748. Throws DomainError without a sign change.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-14, int max_iterations = 200);

/// Finite-difference Hessian of f at x with steps `h` (row-major).
std::vector<double> numerical_hessian(const Objective& f, const std::vector<double>& x,
                                      const std::vector<double>& h);

/// Cholesky test for a symmetric row-major matrix.
bool positive_definite(const std::vector<double>& m, std::size_t n);

}  // namespace resetfpt
