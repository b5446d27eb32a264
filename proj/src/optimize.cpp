#include "resetfpt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "resetfpt/errors.hpp"
#include "resetfpt/rng.hpp"

namespace resetfpt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Point = std::vector<double>;

struct Counted {
  const Objective& f;
  const Box& box;
  int evaluations = 0;

  Point project(Point x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
    return x;
  }
  // Non-finite objective values rank last.
  double operator()(const Point& x) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  }
};

struct RunResult {
  Point x;
  double value = kInf;
  int iterations = 0;
  bool converged = false;
};

double width(const Box& box, std::size_t i) { return box.hi[i] - box.lo[i]; }

RunResult nelder_mead(Counted& eval, const Point& start, const OptimOptions& opts) {
  const std::size_t n = start.size();
  const Box& box = eval.box;
  std::vector<Point> simplex(n + 1, eval.project(start));
  for (std::size_t i = 0; i < n; ++i) {
    const double step = 0.1 * width(box, i);
    Point& p = simplex[i + 1];
    p[i] = p[i] + step <= box.hi[i] ? p[i] + step : p[i] - step;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  RunResult out;
  for (int it = 0; it < opts.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    out.iterations = it;

    double diameter = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        diameter = std::max(diameter, std::abs(simplex[k][i] - simplex[best][i]) / width(box, i));
      }
    }
    const double spread = fv[worst] - fv[best];
    if (fv[best] <= opts.stop_value || diameter <= opts.x_tol ||
        (std::isfinite(spread) &&
         spread <= opts.f_tol * 0.5 * (std::abs(fv[best]) + std::abs(fv[worst])) + 1e-300 &&
         diameter <= 1e-4)) {
      out.converged = true;
      break;
    }

    Point centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      Point p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
      return eval.project(p);
    };
    const Point xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const Point xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Point xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i) {
        simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
      }
      fv[k] = eval(simplex[k]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.x = simplex[best];
  out.value = fv[best];
  return out;
}

// Solves m x = v by Gaussian elimination with partial pivoting; false if singular.
bool solve_dense(std::vector<double> m, std::vector<double>& v, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    }
    if (m[piv * n + c] == 0.0) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
      std::swap(v[c], v[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double factor = m[r * n + c] / m[c * n + c];
      for (std::size_t k = c; k < n; ++k) m[r * n + k] -= factor * m[c * n + k];
      v[r] -= factor * v[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = c + 1; k < n; ++k) v[c] -= m[c * n + k] * v[k];
    v[c] /= m[c * n + c];
  }
  return true;
}

// Difference steps kept inside the box: centres too close to a face are
// shifted inward for the stencil only.
Point stencil_centre(const Box& box, Point x, const Point& h) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], box.lo[i] + h[i], box.hi[i] - h[i]);
  }
  return x;
}

std::vector<double> gradient(const Objective& f, const Point& x, const Point& h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Point a = x, b = x;
    a[i] += h[i];
    b[i] -= h[i];
    g[i] = (f(a) - f(b)) / (2.0 * h[i]);
  }
  return g;
}

}  // namespace

std::vector<double> numerical_hessian(const Objective& f, const std::vector<double>& x,
                                      const std::vector<double>& h) {
  const std::size_t n = x.size();
  std::vector<double> m(n * n);
  const double f0 = f(x);
  for (std::size_t i = 0; i < n; ++i) {
    Point a = x, b = x;
    a[i] += h[i];
    b[i] -= h[i];
    m[i * n + i] = (f(a) - 2.0 * f0 + f(b)) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      Point pp = x, pm = x, mp = x, mm = x;
      pp[i] += h[i]; pp[j] += h[j];
      pm[i] += h[i]; pm[j] -= h[j];
      mp[i] -= h[i]; mp[j] += h[j];
      mm[i] -= h[i]; mm[j] -= h[j];
      m[i * n + j] = m[j * n + i] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
    }
  }
  return m;
}

bool positive_definite(const std::vector<double>& m, std::size_t n) {
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m[i * n + i]));
  if (!(scale > 0.0) || !std::isfinite(scale)) return false;
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 1e-10 * scale)) return false;
    l[j * n + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return true;
}

OptimResult minimize(const Objective& f, const Box& box, const OptimOptions& opts,
                     const std::optional<std::vector<double>>& start) {
  const std::size_t n = box.dim();
  if (n == 0 || box.hi.size() != n) throw DomainError("minimize: empty or inconsistent box");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i]) || !(box.hi[i] > box.lo[i])) {
      throw DomainError("minimize: box bounds must be finite with lo < hi");
    }
  }
  if (start && start->size() != n) throw DomainError("minimize: start has the wrong dimension");

  Counted eval{f, box};
  RunResult best;
  OptimResult out;
  int total_iterations = 0;
  bool any_converged = false;
  for (int k = 0; k < std::max(1, opts.restarts); ++k) {
    Point x0(n);
    if (k == 0) {
      if (start) {
        x0 = *start;
      } else {
        for (std::size_t i = 0; i < n; ++i) x0[i] = 0.5 * (box.lo[i] + box.hi[i]);
      }
    } else {
      PhiloxStream g(opts.seed, static_cast<std::uint64_t>(k));
      for (std::size_t i = 0; i < n; ++i) x0[i] = box.lo[i] + width(box, i) * g.uniform();
    }
    RunResult run = nelder_mead(eval, x0, opts);
    total_iterations += run.iterations;
    any_converged = any_converged || run.converged;
    out.restarts_used = k + 1;
    if (run.value < best.value) best = run;
    if (best.value <= opts.stop_value) break;
  }
  if (!std::isfinite(best.value)) {
    throw OptimError("minimize: objective was not finite at any visited point");
  }

  Point h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = 1e-5 * width(box, i);
  auto projected = [&](const Point& x) { return eval(eval.project(x)); };
  if (opts.refine && best.value > opts.stop_value) {
    for (int step = 0; step < 6; ++step) {
      const Point c = stencil_centre(box, best.x, h);
      std::vector<double> g = gradient(projected, c, h);
      const std::vector<double> hess = numerical_hessian(projected, c, h);
      if (!positive_definite(hess, n)) break;
      std::vector<double> d = g;
      if (!solve_dense(hess, d, n)) break;
      Point cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = c[i] - d[i];
      cand = eval.project(cand);
      const double fc = eval(cand);
      if (!(fc < best.value)) break;
      best.x = cand;
      best.value = fc;
    }
  }

  out.x = best.x;
  out.value = best.value;
  out.iterations = total_iterations;
  out.converged = any_converged;
  const Point c = stencil_centre(box, best.x, h);
  out.hessian = numerical_hessian(projected, c, h);
  out.hessian_positive_definite = positive_definite(out.hessian, n);
  out.evaluations = eval.evaluations;
  if (!out.converged) {
    std::ostringstream os;
    os << "minimize: no Nelder-Mead run converged; best value " << best.value << " at (";
    for (std::size_t i = 0; i < n; ++i) os << (i ? ", " : "") << best.x[i];
    os << ")";
    throw OptimError(os.str());
  }
  return out;
}

double find_root(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_iterations) {
  const double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "find_root: no sign change on [" << a << ", " << b << "] (f = " << fa << ", " << fb
       << ")";
    throw DomainError(os.str());
  }
  auto tol = [rel_tol](double u, double v) {
    return std::abs(u - v) <= rel_tol * std::max(std::abs(u), std::abs(v)) + 1e-300;
  };
  boost::uintmax_t iters = static_cast<boost::uintmax_t>(max_iterations);
  const auto [lo, hi] = a < b ? boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters)
                              : boost::math::tools::toms748_solve(f, b, a, fb, fa, tol, iters);
  if (iters >= static_cast<boost::uintmax_t>(max_iterations) && !tol(lo, hi)) {
    throw NumericalError("find_root: iteration limit reached before the tolerance");
  }
  return 0.5 * (lo + hi);
}

}  // namespace resetfpt
