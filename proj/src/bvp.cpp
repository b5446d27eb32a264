#include <algorithm>
#include <cmath>
#include <sstream>

#include "resetfpt/analytic.hpp"
#include "resetfpt/errors.hpp"

namespace resetfpt {
namespace {

// Largest denominator tried when placing x_R on a grid node.
constexpr int kMaxSnapDenominator = 1024;

struct GridSystem {
  std::vector<double> lower, diag, upper;
};

// Thomas algorithm for two right-hand sides sharing one matrix. Rows 0 and n
// are the Dirichlet rows and are not stored.
void solve_tridiagonal(const GridSystem& sys, std::vector<double>& rhs1, std::vector<double>& rhs2) {
  const std::size_t m = sys.diag.size();
  std::vector<double> c(m);
  double pivot = sys.diag[0];
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) {
      pivot = sys.diag[i] - sys.lower[i] * c[i - 1];
      rhs1[i] -= sys.lower[i] * rhs1[i - 1];
      rhs2[i] -= sys.lower[i] * rhs2[i - 1];
    }
    if (std::abs(pivot) < 1e-300) throw SolverError("bvp_solve: singular tridiagonal system");
    c[i] = sys.upper[i] / pivot;
    rhs1[i] /= pivot;
    rhs2[i] /= pivot;
  }
  for (std::size_t i = m - 1; i-- > 0;) {
    rhs1[i] -= c[i] * rhs1[i + 1];
    rhs2[i] -= c[i] * rhs2[i + 1];
  }
}

// Four-point Lagrange interpolation on a uniform grid starting at lo.
double cubic_at(const std::vector<double>& f, double lo, double h, double x) {
  const int n = static_cast<int>(f.size()) - 1;
  const double t = (x - lo) / h;
  int i = static_cast<int>(std::floor(t));
  if (i >= 0 && i <= n && std::abs(t - i) < 1e-12) return f[static_cast<std::size_t>(i)];
  if (i + 1 <= n && std::abs(t - (i + 1)) < 1e-12) return f[static_cast<std::size_t>(i + 1)];
  i = std::clamp(i - 1, 0, std::max(0, n - 3));
  double value = 0.0;
  for (int j = 0; j < 4 && i + j <= n; ++j) {
    double w = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k != j) w *= (t - (i + k)) / static_cast<double>(j - k);
    }
    value += w * f[static_cast<std::size_t>(i + j)];
  }
  return value;
}

// Denominator q <= kMaxSnapDenominator with fraction * q integral, or 0.
int snap_denominator(double fraction) {
  for (int q = 1; q <= kMaxSnapDenominator; ++q) {
    const double p = std::round(fraction * q);
    if (std::abs(fraction * q - p) < 1e-12 * q) return q;
  }
  return 0;
}

struct Attempt {
  std::vector<double> f;
  double kappa = 0.0;
  double residual = 0.0;
  double gap = 0.0;
};

Attempt solve_on_grid(const DiffusionModel& model, double lo, double hi, int n, double r,
                      double x_reset, double forcing, double f_lo, double f_hi) {
  const double h = (hi - lo) / n;
  const std::size_t m = static_cast<std::size_t>(n - 1);
  GridSystem sys;
  sys.lower.resize(m);
  sys.diag.resize(m);
  sys.upper.resize(m);
  std::vector<double> u(m), w(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = lo + static_cast<double>(k + 1) * h;
    const double s = model.sigma(x);
    const double mu = model.drift(x);
    if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(mu)) {
      std::ostringstream os;
      os << "bvp_solve: coefficients invalid at x=" << x << " (sigma=" << s << ", mu=" << mu
         << ")";
      throw DomainError(os.str());
    }
    // Equation scaled by h^2.
    const double diff = 0.5 * s * s;
    sys.lower[k] = diff - 0.5 * mu * h;
    sys.diag[k] = -2.0 * diff - r * h * h;
    sys.upper[k] = diff + 0.5 * mu * h;
    u[k] = -forcing * h * h;
    w[k] = -r * h * h;
  }
  u[0] -= sys.lower[0] * f_lo;
  u[m - 1] -= sys.upper[m - 1] * f_hi;
  const GridSystem kept = sys;
  solve_tridiagonal(sys, u, w);

  std::vector<double> ufull(m + 2), wfull(m + 2, 0.0);
  ufull[0] = f_lo;
  ufull[m + 1] = f_hi;
  std::copy(u.begin(), u.end(), ufull.begin() + 1);
  std::copy(w.begin(), w.end(), wfull.begin() + 1);

  const double u_r = cubic_at(ufull, lo, h, x_reset);
  const double w_r = cubic_at(wfull, lo, h, x_reset);
  if (std::abs(1.0 - w_r) < 1e-14) {
    throw SolverError("bvp_solve: nonlocal coupling is singular (1 - w(x_R) = 0)");
  }
  Attempt out;
  out.kappa = u_r / (1.0 - w_r);
  out.f.resize(m + 2);
  for (std::size_t i = 0; i < m + 2; ++i) out.f[i] = ufull[i] + out.kappa * wfull[i];
  out.f.front() = f_lo;
  out.f.back() = f_hi;

  for (std::size_t k = 0; k < m; ++k) {
    const double lhs = kept.lower[k] * out.f[k] + kept.diag[k] * out.f[k + 1] +
                       kept.upper[k] * out.f[k + 2];
    const double res = (lhs + (r * out.kappa + forcing) * h * h) / (h * h);
    out.residual = std::max(out.residual, std::abs(res));
  }
  out.gap = std::abs(cubic_at(out.f, lo, h, x_reset) - out.kappa);
  return out;
}

}  // namespace

double BvpSolution::operator()(double xq) const {
  const double lo = x.front();
  const double h = (x.back() - lo) / intervals;
  if (xq < lo - 1e-12 * h || xq > x.back() + 1e-12 * h) {
    std::ostringstream os;
    os << "bvp solution evaluated at " << xq << " outside [" << lo << ", " << x.back() << "]";
    throw DomainError(os.str());
  }
  return cubic_at(f, lo, h, std::clamp(xq, lo, x.back()));
}

BvpSolution bvp_solve(const DiffusionModel& model, double lo, double hi, double r,
                      double x_reset, BvpTarget target, const BvpOptions& opts) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("bvp_solve: need finite lo < hi");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("bvp_solve: reset rate must be >= 0");
  if (!(x_reset > lo && x_reset < hi)) {
    std::ostringstream os;
    os << "bvp_solve: x_R=" << x_reset << " must lie in (" << lo << ", " << hi << ")";
    throw DomainError(os.str());
  }
  const double forcing = target == BvpTarget::MeanExitTime ? 1.0 : 0.0;
  const auto [f_lo, f_hi] = opts.boundary.value_or(
      target == BvpTarget::ExitProbability ? std::pair{1.0, 0.0} : std::pair{0.0, 0.0});

  const int q = snap_denominator((x_reset - lo) / (hi - lo));
  int n = opts.min_intervals;
  if (q > 0 && q <= opts.max_intervals) n = q * std::max(1, (opts.min_intervals + q - 1) / q);

  Attempt prev = solve_on_grid(model, lo, hi, n, r, x_reset, forcing, f_lo, f_hi);
  double prev_change = std::numeric_limits<double>::quiet_NaN();
  double change = std::numeric_limits<double>::infinity();
  double order = std::numeric_limits<double>::quiet_NaN();
  while (2 * n <= opts.max_intervals) {
    Attempt next = solve_on_grid(model, lo, hi, 2 * n, r, x_reset, forcing, f_lo, f_hi);
    change = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < prev.f.size(); ++i) {
      change = std::max(change, std::abs(next.f[2 * i] - prev.f[i]));
      scale = std::max(scale, std::abs(next.f[2 * i]));
    }
    if (std::isfinite(prev_change) && change > 0.0) order = std::log2(prev_change / change);
    prev_change = change;
    prev = std::move(next);
    n *= 2;
    if (change < opts.change_tol * scale) break;
  }
  double scale = 1.0;
  for (double v : prev.f) scale = std::max(scale, std::abs(v));
  if (!(change < opts.change_tol * scale)) {
    std::ostringstream os;
    os << "bvp_solve: grid refinement did not settle by " << n << " intervals (last change "
       << change << ")";
    throw SolverError(os.str());
  }

  BvpSolution sol;
  sol.intervals = n;
  sol.x.resize(prev.f.size());
  const double h = (hi - lo) / n;
  for (std::size_t i = 0; i < sol.x.size(); ++i) sol.x[i] = lo + static_cast<double>(i) * h;
  sol.x.back() = hi;
  sol.f = std::move(prev.f);
  sol.kappa = prev.kappa;
  sol.residual = prev.residual;
  sol.nonlocal_gap = prev.gap;
  sol.refinement_change = change;
  sol.order = order;
  sol.reset_on_grid = q > 0 && n % q == 0;
  return sol;
}

}  // namespace resetfpt
