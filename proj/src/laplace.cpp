#include "resetfpt/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "resetfpt/errors.hpp"

namespace resetfpt {
namespace {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Gaver-Stehfest weights V_k, k = 1..n, in long double.
std::vector<long double> stehfest_weights(int n) {
  auto fact = [](int k) {
    long double f = 1.0L;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  const int half = n / 2;
  std::vector<long double> v(static_cast<std::size_t>(n) + 1, 0.0L);
  for (int k = 1; k <= n; ++k) {
    long double acc = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      acc += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
             (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    v[static_cast<std::size_t>(k)] = ((k + half) % 2 == 0 ? 1.0L : -1.0L) * acc;
  }
  return v;
}

// Derivatives T_k^{(m)}(x) for k = 0..n and m = 0..order, by differentiating
// the three-term recurrence.
std::vector<std::vector<double>> chebyshev_derivatives(int n, int order, double x) {
  std::vector<std::vector<double>> d(static_cast<std::size_t>(order) + 1,
                                     std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  for (int m = 0; m <= order; ++m) {
    auto& cur = d[static_cast<std::size_t>(m)];
    cur[0] = m == 0 ? 1.0 : 0.0;
    if (n >= 1) cur[1] = m == 0 ? x : (m == 1 ? 1.0 : 0.0);
    for (int k = 1; k < n; ++k) {
      const double lower = m > 0 ? d[static_cast<std::size_t>(m) - 1][static_cast<std::size_t>(k)] : 0.0;
      cur[static_cast<std::size_t>(k) + 1] =
          2.0 * x * cur[static_cast<std::size_t>(k)] + 2.0 * m * lower - cur[static_cast<std::size_t>(k) - 1];
    }
  }
  return d;
}

// Derivatives of fhat at 0 from a degree-n Chebyshev interpolant on [lo, hi].
std::vector<double> derivatives_at_zero(const RealTransform& fhat, double lo, double hi, int n,
                                        int order) {
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const double x = std::cos(kPi * j / n);
    values[static_cast<std::size_t>(j)] = fhat(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
  }
  std::vector<double> a(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      acc += w * values[static_cast<std::size_t>(j)] * std::cos(kPi * k * j / n);
    }
    a[static_cast<std::size_t>(k)] = acc * 2.0 / n * ((k == 0 || k == n) ? 0.5 : 1.0);
  }
  const double x0 = (0.0 - 0.5 * (lo + hi)) / (0.5 * (hi - lo));
  const auto t = chebyshev_derivatives(n, order, x0);
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  const double scale = 2.0 / (hi - lo);
  for (int m = 0; m <= order; ++m) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) acc += a[static_cast<std::size_t>(k)] * t[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(m)] = acc * std::pow(scale, m);
  }
  return out;
}

// Trapezoid integrals of f and t f. A panel starting at t = 0 uses the
// distribution function instead, since the density may be unbounded there.
void grid_integrals(const std::vector<double>& t, const std::vector<double>& f,
                    const ComplexTransform& fhat, int nodes, double& mass, double& moment) {
  mass = 0.0;
  moment = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    if (i == 0 && t[0] == 0.0) {
      const double cdf = talbot_invert([&](cplx s) { return fhat(s) / s; }, t[1], nodes);
      mass += cdf;
      moment += 0.5 * t[1] * cdf;
      continue;
    }
    mass += 0.5 * h * (f[i] + f[i + 1]);
    moment += 0.5 * h * (t[i] * f[i] + t[i + 1] * f[i + 1]);
  }
}

}  // namespace

double talbot_invert(const ComplexTransform& fhat, double t, int nodes) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("talbot_invert: t must be > 0");
  if (nodes < 2) throw DomainError("talbot_invert: need at least 2 nodes");
  const double r = 2.0 * nodes / (5.0 * t);
  double acc = 0.5 * (fhat(cplx(r, 0.0)) * std::exp(r * t)).real();
  for (int k = 1; k < nodes; ++k) {
    const double th = k * kPi / nodes;
    const double c = std::cos(th) / std::sin(th);
    const cplx s(r * th * c, r * th);
    const double sigma = th + (th * c - 1.0) * c;
    acc += (std::exp(t * s) * fhat(s) * cplx(1.0, sigma)).real();
  }
  return r / nodes * acc;
}

double stehfest_invert(const RealTransform& fhat, double t, int terms) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("stehfest_invert: t must be > 0");
  if (terms < 2 || terms % 2 != 0) throw DomainError("stehfest_invert: terms must be even and >= 2");
  const auto v = stehfest_weights(terms);
  const long double ln2 = 0.693147180559945309417232121458176568L;
  long double acc = 0.0L;
  for (int k = 1; k <= terms; ++k) {
    acc += v[static_cast<std::size_t>(k)] * static_cast<long double>(fhat(static_cast<double>(k * ln2 / t)));
  }
  return static_cast<double>(acc * ln2 / t);
}

InversionResult laplace_invert(const ComplexTransform& fhat, const std::vector<double>& t,
                               const InversionOptions& opts) {
  if (t.empty()) throw DomainError("laplace_invert: empty grid");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0) || !std::isfinite(t[i]) || (i > 0 && t[i] < t[i - 1])) {
      throw DomainError("laplace_invert: grid must be finite, >= 0 and nondecreasing");
    }
  }
  const cplx at_zero = fhat(cplx(0.0, 0.0));
  if (std::abs(at_zero - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "laplace_invert: fhat(0) = " << at_zero.real() << " is not 1";
    throw DomainError(os.str());
  }
  auto initial_value = [&] {
    const double s = 1e12;
    return (s * fhat(cplx(s, 0.0))).real();
  };
  auto run = [&](bool stehfest) {
    InversionResult res;
    res.t = t;
    res.f.resize(t.size());
    res.method = stehfest ? "stehfest" : "talbot";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == 0.0) {
        res.f[i] = initial_value();
      } else if (stehfest) {
        res.f[i] = stehfest_invert([&](double s) { return fhat(cplx(s, 0.0)).real(); }, t[i],
                                   opts.stehfest_terms);
      } else {
        res.f[i] = talbot_invert(fhat, t[i], opts.talbot_nodes);
      }
    }
    double peak = 0.0;
    for (double v : res.f) {
      if (std::isfinite(v)) peak = std::max(peak, std::abs(v));
    }
    std::vector<double> negative(t.size(), 0.0);
    bool ringing = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (res.f[i] < 0.0) {
        ringing = ringing || res.f[i] < -opts.clip_tolerance * peak;
        negative[i] = -res.f[i];
        res.f[i] = 0.0;
      }
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      res.clip_mass += 0.5 * (t[i + 1] - t[i]) * (negative[i] + negative[i + 1]);
    }
    grid_integrals(res.t, res.f, fhat, opts.talbot_nodes, res.mass, res.first_moment);
    const bool finite = std::all_of(res.f.begin() + (t[0] == 0.0 ? 1 : 0), res.f.end(),
                                    [](double v) { return std::isfinite(v); });
    const bool ok = finite && !ringing &&
                    (!opts.check_mass || t.size() < 2 ||
                     std::abs(res.mass - 1.0) <= opts.mass_tolerance);
    return std::make_pair(res, ok);
  };

  auto [talbot, talbot_ok] = run(false);
  auto [steh, steh_ok] = run(true);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0) talbot.stehfest_gap = std::max(talbot.stehfest_gap, std::abs(talbot.f[i] - steh.f[i]));
  }
  steh.stehfest_gap = talbot.stehfest_gap;
  if (talbot_ok) return talbot;
  if (steh_ok) return steh;
  std::ostringstream os;
  os << "laplace_invert: inversion failed its checks (grid mass " << talbot.mass
     << " by Talbot, " << steh.mass << " by Stehfest)";
  throw InversionError(os.str());
}

Moments moments_from_lt(const RealTransform& fhat, int order, const MomentOptions& opts) {
  if (order < 1 || order > 4) throw DomainError("moments_from_lt: order must be in 1..4");
  Moments out;
  const double f0 = fhat(0.0);
  if (!(std::abs(f0 - 1.0) <= 1e-6)) {
    throw DomainError("moments_from_lt: fhat(0) must be 1");
  }
  // Crude mean for the window scale.
  const double delta = 1e-6;
  const double m1_guess = (f0 - fhat(delta)) / delta;
  if (!(m1_guess > 1e-12)) {
    // No mass away from 0 at the resolution of the probe.
    out.raw = {f0, 0.0, 0.0, 0.0, 0.0};
    out.central = {1.0, 0.0, 0.0, 0.0, 0.0};
    return out;
  }
  // Pick the (window, degree) whose estimate moves least when the degree
  // grows by 4: truncation error falls with the degree, roundoff rises.
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  double best_w = 0.0;
  for (double c : {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}) {
    const double w = c / m1_guess;
    const double lo = opts.two_sided ? -w : 0.0;
    std::vector<std::vector<double>> est;
    try {
      for (int n = opts.min_degree; n <= opts.max_degree; n += 4) {
        est.push_back(derivatives_at_zero(fhat, lo, w, n, order));
      }
    } catch (const DomainError&) {
      continue;
    }
    for (std::size_t i = 0; i + 1 < est.size(); ++i) {
      const auto& a = est[i];
      const auto& b = est[i + 1];
      double gap = 0.0;
      for (int k = 1; k <= order; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double scale = std::max(std::abs(b[kk]), std::pow(std::abs(b[1]), k));
        gap = std::max(gap, std::isfinite(a[kk]) && std::isfinite(b[kk])
                                ? std::abs(a[kk] - b[kk]) / scale
                                : std::numeric_limits<double>::infinity());
      }
      if (gap < best_gap) {
        best_gap = gap;
        best = b;
        best_w = w;
      }
    }
  }
  if (!(best_gap <= opts.rel_tol)) {
    std::ostringstream os;
    os << "moments_from_lt: successive Chebyshev estimates differ by " << best_gap
       << " relative (tolerance " << opts.rel_tol << ")";
    throw NumericalError(os.str());
  }
  {
    const double w = best_w;
    const std::vector<double>& b = best;
    out.window = w;
    out.raw[0] = f0;
    for (int k = 1; k <= order; ++k) {
      out.raw[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * b[static_cast<std::size_t>(k)];
    }
    const auto& m = out.raw;
    out.central[0] = 1.0;
    out.central[1] = 0.0;
    if (order >= 2) out.central[2] = m[2] - m[1] * m[1];
    if (order >= 3) out.central[3] = m[3] - 3.0 * m[1] * m[2] + 2.0 * m[1] * m[1] * m[1];
    if (order >= 4) {
      out.central[4] = m[4] - 4.0 * m[1] * m[3] + 6.0 * m[1] * m[1] * m[2] - 3.0 * std::pow(m[1], 4);
    }
    if (order >= 3 && out.central[2] > 0.0) out.skewness = out.central[3] / std::pow(out.central[2], 1.5);
    if (order >= 4 && out.central[2] > 0.0) {
      out.excess_kurtosis = out.central[4] / (out.central[2] * out.central[2]) - 3.0;
    }
    out.consistency = best_gap;
    return out;
  }
}

}  // namespace resetfpt
