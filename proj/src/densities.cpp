#include "resetfpt/densities.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "resetfpt/errors.hpp"
#include "resetfpt/quadrature.hpp"

namespace resetfpt {
namespace {

constexpr double kAtomTol = 1e-12;
constexpr double kEnumerationTail = 1e-14;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool is_positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Nonnegative integer nearest to x, or -1 when x is not an integer.
long as_count(double x) {
  if (!std::isfinite(x) || x < -kAtomTol) return -1;
  const double k = std::round(x);
  return std::abs(x - k) <= kAtomTol * std::max(1.0, k) ? static_cast<long>(k) : -1;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// int_0^1 x^k e^{-s x} dx for k = 0, 1.
double moment_exp(int k, double s) {
  if (std::abs(s) < 1.0) {
    // Alternating Taylor series, fast for |s| < 1.
    double term = 1.0;
    double sum = 0.0;
    for (int j = 0; j < 40; ++j) {
      sum += term / (j + k + 1);
      term *= -s / (j + 1);
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  const double e = std::exp(-s);
  if (k == 0) return -std::expm1(-s) / s;
  return (1.0 - e * (1.0 + s)) / (s * s);
}

// expm1(u) / u with its limit at 0.
double expm1_ratio(double u) {
  if (std::abs(u) < 1e-5) return 1.0 + u / 2.0 + u * u / 6.0;
  return std::expm1(u) / u;
}

// Kummer series 1F1(a; c; t) for t >= 0; returns NaN if 200 terms do not settle.
double kummer_series(double a, double c, double t) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 200; ++k) {
    term *= t / k * (a + k - 1) / (c + k - 1);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

using cplx = std::complex<double>;

cplx expm1_ratio(cplx u) {
  if (std::abs(u) < 1e-3) return 1.0 + u * (0.5 + u * (1.0 / 6.0 + u / 24.0));
  return (std::exp(u) - 1.0) / u;
}

// Complex int_0^1 x^k e^{-s x} dx for k = 0, 1.
cplx moment_exp(int k, cplx s) {
  if (std::abs(s) < 1.0) {
    cplx term = 1.0;
    cplx sum = 0.0;
    for (int j = 0; j < 40; ++j) {
      sum += term / static_cast<double>(j + k + 1);
      term *= -s / static_cast<double>(j + 1);
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  const cplx e = std::exp(-s);
  if (k == 0) return (1.0 - e) / s;
  return (1.0 - e * (1.0 + s)) / (s * s);
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Beta: return "beta";
    case FamilyKind::ScaledBeta: return "scaled_beta";
    case FamilyKind::Uniform: return "uniform";
    case FamilyKind::TruncatedExponential: return "truncated_exponential";
    case FamilyKind::Exponential: return "exponential";
    case FamilyKind::Gamma: return "gamma";
    case FamilyKind::Triangular: return "triangular";
    case FamilyKind::Linear: return "linear";
    case FamilyKind::DiscreteUniform: return "discrete_uniform";
    case FamilyKind::Binomial: return "binomial";
    case FamilyKind::Geometric: return "geometric";
    case FamilyKind::Poisson: return "poisson";
    case FamilyKind::PointMass: return "point_mass";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  static const FamilyKind all[] = {
      FamilyKind::Beta,        FamilyKind::ScaledBeta,      FamilyKind::Uniform,
      FamilyKind::TruncatedExponential, FamilyKind::Exponential, FamilyKind::Gamma,
      FamilyKind::Triangular,  FamilyKind::Linear,          FamilyKind::DiscreteUniform,
      FamilyKind::Binomial,    FamilyKind::Geometric,       FamilyKind::Poisson,
      FamilyKind::PointMass};
  for (FamilyKind k : all) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown density family kind '" + name + "'");
}

DensityFamily DensityFamily::beta(double alpha, double beta) {
  require(is_positive_finite(alpha) && is_positive_finite(beta), "beta: alpha, beta must be > 0");
  return {FamilyKind::Beta, alpha, beta, 1.0};
}

DensityFamily DensityFamily::scaled_beta(double alpha, double beta, double upper) {
  require(is_positive_finite(alpha) && is_positive_finite(beta),
          "scaled_beta: alpha, beta must be > 0");
  require(is_positive_finite(upper), "scaled_beta: upper end must be > 0");
  return {FamilyKind::ScaledBeta, alpha, beta, upper};
}

DensityFamily DensityFamily::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform: need lo < hi");
  return {FamilyKind::Uniform, lo, hi};
}

DensityFamily DensityFamily::truncated_exponential(double theta, double upper) {
  require(is_positive_finite(theta), "truncated_exponential: theta must be > 0");
  require(is_positive_finite(upper), "truncated_exponential: upper end must be > 0");
  return {FamilyKind::TruncatedExponential, theta, upper};
}

DensityFamily DensityFamily::exponential(double theta) {
  require(is_positive_finite(theta), "exponential: theta must be > 0");
  return {FamilyKind::Exponential, theta};
}

DensityFamily DensityFamily::gamma(double a, double theta) {
  require(is_positive_finite(a) && is_positive_finite(theta), "gamma: a, theta must be > 0");
  return {FamilyKind::Gamma, a, theta};
}

DensityFamily DensityFamily::triangular() { return {FamilyKind::Triangular}; }

DensityFamily DensityFamily::linear(double a1, double a0) {
  require(std::isfinite(a1) && std::isfinite(a0), "linear: coefficients must be finite");
  require(std::abs(a1 / 2.0 + a0 - 1.0) <= 1e-9, "linear: a1/2 + a0 must equal 1");
  require(a0 >= 0.0 && a1 + a0 >= 0.0, "linear: a1 x + a0 must be nonnegative on [0,1]");
  return {FamilyKind::Linear, a1, a0};
}

DensityFamily DensityFamily::discrete_uniform(std::vector<double> points) {
  require(!points.empty(), "discrete_uniform: need at least one point");
  for (double p : points) require(std::isfinite(p), "discrete_uniform: points must be finite");
  DensityFamily f{FamilyKind::DiscreteUniform};
  f.points_ = std::move(points);
  return f;
}

DensityFamily DensityFamily::binomial(int n, double p) {
  require(n >= 1, "binomial: n must be >= 1");
  require(p > 0.0 && p < 1.0, "binomial: p must lie in (0,1)");
  return {FamilyKind::Binomial, static_cast<double>(n), p};
}

DensityFamily DensityFamily::geometric(double p) {
  require(p > 0.0 && p < 1.0, "geometric: p must lie in (0,1)");
  return {FamilyKind::Geometric, p};
}

DensityFamily DensityFamily::poisson(double nu) {
  require(is_positive_finite(nu), "poisson: nu must be > 0");
  return {FamilyKind::Poisson, nu};
}

DensityFamily DensityFamily::point_mass(double x) {
  require(std::isfinite(x), "point_mass: location must be finite");
  return {FamilyKind::PointMass, x};
}

bool DensityFamily::is_discrete() const {
  switch (kind_) {
    case FamilyKind::DiscreteUniform:
    case FamilyKind::Binomial:
    case FamilyKind::Geometric:
    case FamilyKind::Poisson:
    case FamilyKind::PointMass:
      return true;
    default:
      return false;
  }
}

Support DensityFamily::support() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case FamilyKind::Beta: return {0.0, 1.0};
    case FamilyKind::ScaledBeta: return {0.0, p2_};
    case FamilyKind::Uniform: return {p0_, p1_};
    case FamilyKind::TruncatedExponential: return {0.0, p1_};
    case FamilyKind::Exponential:
    case FamilyKind::Gamma: return {0.0, inf};
    case FamilyKind::Triangular:
    case FamilyKind::Linear: return {0.0, 1.0};
    case FamilyKind::DiscreteUniform: {
      auto [lo, hi] = std::minmax_element(points_.begin(), points_.end());
      return {*lo, *hi};
    }
    case FamilyKind::Binomial: return {0.0, p0_};
    case FamilyKind::Geometric:
    case FamilyKind::Poisson: return {0.0, inf};
    case FamilyKind::PointMass: return {p0_, p0_};
  }
  return {};
}

double DensityFamily::pdf(double x) const {
  if (std::isnan(x)) return 0.0;
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta: {
      const double y = x / p2_;
      if (y < 0.0 || y > 1.0) return 0.0;
      return std::pow(y, p0_ - 1.0) * std::pow(1.0 - y, p1_ - 1.0) *
             std::exp(-log_beta(p0_, p1_)) / p2_;
    }
    case FamilyKind::Uniform:
      return (x < p0_ || x > p1_) ? 0.0 : 1.0 / (p1_ - p0_);
    case FamilyKind::TruncatedExponential:
      if (x < 0.0 || x > p1_) return 0.0;
      return p0_ * std::exp(-p0_ * x) / -std::expm1(-p0_ * p1_);
    case FamilyKind::Exponential:
      return x < 0.0 ? 0.0 : p0_ * std::exp(-p0_ * x);
    case FamilyKind::Gamma: {
      if (x < 0.0) return 0.0;
      if (x == 0.0) {
        if (p0_ < 1.0) return std::numeric_limits<double>::infinity();
        return p0_ == 1.0 ? p1_ : 0.0;
      }
      return std::exp(p0_ * std::log(p1_) + (p0_ - 1.0) * std::log(x) - p1_ * x - std::lgamma(p0_));
    }
    case FamilyKind::Triangular:
      if (x < 0.0 || x > 1.0) return 0.0;
      return x < 0.5 ? 4.0 * x : 4.0 - 4.0 * x;
    case FamilyKind::Linear:
      return (x < 0.0 || x > 1.0) ? 0.0 : p0_ * x + p1_;
    case FamilyKind::DiscreteUniform: {
      const auto n = static_cast<double>(points_.size());
      const auto hits = std::count_if(points_.begin(), points_.end(), [&](double p) {
        return std::abs(p - x) <= kAtomTol * std::max(1.0, std::abs(p));
      });
      return static_cast<double>(hits) / n;
    }
    case FamilyKind::Binomial: {
      const long k = as_count(x);
      const long n = static_cast<long>(p0_);
      if (k < 0 || k > n) return 0.0;
      return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * std::log(p1_) + (n - k) * std::log1p(-p1_));
    }
    case FamilyKind::Geometric: {
      const long k = as_count(x);
      if (k < 0) return 0.0;
      return p0_ * std::exp(k * std::log1p(-p0_));
    }
    case FamilyKind::Poisson: {
      const long k = as_count(x);
      if (k < 0) return 0.0;
      return std::exp(-p0_ + k * std::log(p0_) - std::lgamma(k + 1.0));
    }
    case FamilyKind::PointMass:
      return std::abs(x - p0_) <= kAtomTol * std::max(1.0, std::abs(p0_)) ? 1.0 : 0.0;
  }
  return 0.0;
}

double DensityFamily::cdf(double x) const {
  if (is_discrete()) {
    double acc = 0.0;
    for (const Atom& a : atoms()) {
      if (a.x <= x) acc += a.weight;
    }
    return std::min(acc, 1.0);
  }
  const Support s = support();
  if (x <= s.lo) return 0.0;
  if (x >= s.hi) return 1.0;
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta:
      return boost::math::ibeta(p0_, p1_, x / p2_);
    case FamilyKind::Uniform:
      return (x - p0_) / (p1_ - p0_);
    case FamilyKind::TruncatedExponential:
      return std::expm1(-p0_ * x) / std::expm1(-p0_ * p1_);
    case FamilyKind::Exponential:
      return -std::expm1(-p0_ * x);
    case FamilyKind::Gamma:
      return boost::math::gamma_p(p0_, p1_ * x);
    case FamilyKind::Triangular:
      return x < 0.5 ? 2.0 * x * x : 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
    case FamilyKind::Linear:
      return p0_ * x * x / 2.0 + p1_ * x;
    default:
      return 0.0;
  }
}

double DensityFamily::laplace_lower_bound() const {
  switch (kind_) {
    case FamilyKind::Exponential:
    case FamilyKind::Gamma:
      return -(kind_ == FamilyKind::Exponential ? p0_ : p1_);
    case FamilyKind::Geometric:
      return std::log1p(-p0_);
    default:
      return -std::numeric_limits<double>::infinity();
  }
}

double DensityFamily::beta_mgf(double t) const {
  // E[e^{tY}] = 1F1(alpha; alpha + beta; t); Kummer's transformation keeps the
  // series positive for t < 0.
  double value = t >= 0.0 ? kummer_series(p0_, p0_ + p1_, t)
                          : std::exp(t) * kummer_series(p1_, p0_ + p1_, -t);
  if (std::isnan(value)) {
    // Series did not settle within 200 terms (|t| large): integrate instead.
    const double lb = log_beta(p0_, p1_);
    QuadOptions opts;
    opts.rel_tol = 1e-12;
    auto integrand = [&](double y) {
      if (y <= 0.0 || y >= 1.0) return 0.0;
      return std::exp((p0_ - 1.0) * std::log(y) + (p1_ - 1.0) * std::log1p(-y) + t * y - lb);
    };
    value = integrate(integrand, 0.0, 1.0, opts).value;
  }
  return value;
}

double DensityFamily::laplace(double s) const {
  if (std::isnan(s)) throw DomainError("laplace: argument is NaN");
  if (s == 0.0) return 1.0;
  if (!(s > laplace_lower_bound())) {
    std::ostringstream os;
    os << "laplace: s=" << s << " outside the convergence strip of " << to_string(kind_)
       << " (s > " << laplace_lower_bound() << ")";
    throw DomainError(os.str());
  }
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta:
      return beta_mgf(-s * p2_);
    case FamilyKind::Uniform: {
      const double w = p1_ - p0_;
      return std::exp(-s * p0_) * expm1_ratio(-s * w);
    }
    case FamilyKind::TruncatedExponential: {
      const double theta = p0_;
      const double c = p1_;
      // theta/(theta+s) * (1 - e^{-(theta+s)c}) / (1 - e^{-theta c})
      return theta * c * expm1_ratio(-(theta + s) * c) / -std::expm1(-theta * c);
    }
    case FamilyKind::Exponential:
      return p0_ / (p0_ + s);
    case FamilyKind::Gamma:
      return std::pow(p1_ / (p1_ + s), p0_);
    case FamilyKind::Triangular: {
      const double ratio = expm1_ratio(-s / 2.0);
      return ratio * ratio;
    }
    case FamilyKind::Linear:
      return p0_ * moment_exp(1, s) + p1_ * moment_exp(0, s);
    case FamilyKind::DiscreteUniform: {
      double acc = 0.0;
      for (double p : points_) acc += std::exp(-s * p);
      return acc / static_cast<double>(points_.size());
    }
    case FamilyKind::Binomial:
      return std::pow(1.0 - p1_ + p1_ * std::exp(-s), p0_);
    case FamilyKind::Geometric:
      return p0_ / (1.0 - (1.0 - p0_) * std::exp(-s));
    case FamilyKind::Poisson:
      return std::exp(p0_ * std::expm1(-s));
    case FamilyKind::PointMass:
      return std::exp(-s * p0_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::complex<double> DensityFamily::laplace(std::complex<double> s) const {
  if (s.imag() == 0.0) return laplace(s.real());
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    throw DomainError("laplace: argument is not finite");
  }
  if (!(s.real() > laplace_lower_bound())) {
    std::ostringstream os;
    os << "laplace: Re s=" << s.real() << " outside the convergence strip of "
       << to_string(kind_) << " (Re s > " << laplace_lower_bound() << ")";
    throw DomainError(os.str());
  }
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta: {
      // Smoothstep substitution y = 3t^2 - 2t^3 tames the endpoint powers.
      const double lb = log_beta(p0_, p1_);
      const cplx z = -s * p2_;
      QuadOptions opts;
      opts.rel_tol = 1e-11;
      opts.abs_tol = 1e-15;
      auto part = [&](bool imag) {
        return integrate(
                   [&](double t) {
                     const double y = t * t * (3.0 - 2.0 * t);
                     if (y <= 0.0 || y >= 1.0) return 0.0;
                     const double w = 6.0 * t * (1.0 - t) *
                                      std::exp((p0_ - 1.0) * std::log(y) +
                                               (p1_ - 1.0) * std::log1p(-y) - lb);
                     const cplx v = w * std::exp(z * y);
                     return imag ? v.imag() : v.real();
                   },
                   0.0, 1.0, opts)
            .value;
      };
      return {part(false), part(true)};
    }
    case FamilyKind::Uniform: {
      const double w = p1_ - p0_;
      return std::exp(-s * p0_) * expm1_ratio(-s * w);
    }
    case FamilyKind::TruncatedExponential: {
      const double theta = p0_;
      const double c = p1_;
      return theta * c * expm1_ratio(-(theta + s) * c) / -std::expm1(-theta * c);
    }
    case FamilyKind::Exponential:
      return p0_ / (p0_ + s);
    case FamilyKind::Gamma:
      return std::pow(p1_ / (p1_ + s), p0_);
    case FamilyKind::Triangular: {
      const cplx ratio = expm1_ratio(-s / 2.0);
      return ratio * ratio;
    }
    case FamilyKind::Linear:
      return p0_ * moment_exp(1, s) + p1_ * moment_exp(0, s);
    case FamilyKind::DiscreteUniform: {
      cplx acc = 0.0;
      for (double p : points_) acc += std::exp(-s * p);
      return acc / static_cast<double>(points_.size());
    }
    case FamilyKind::Binomial:
      return std::pow(1.0 - p1_ + p1_ * std::exp(-s), p0_);
    case FamilyKind::Geometric:
      return p0_ / (1.0 - (1.0 - p0_) * std::exp(-s));
    case FamilyKind::Poisson:
      return std::exp(p0_ * (std::exp(-s) - 1.0));
    case FamilyKind::PointMass:
      return std::exp(-s * p0_);
  }
  return {std::numeric_limits<double>::quiet_NaN(), 0.0};
}

double DensityFamily::mean() const {
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta:
      return p2_ * p0_ / (p0_ + p1_);
    case FamilyKind::Uniform:
      return 0.5 * (p0_ + p1_);
    case FamilyKind::TruncatedExponential:
      return 1.0 / p0_ - p1_ / std::expm1(p0_ * p1_);
    case FamilyKind::Exponential:
      return 1.0 / p0_;
    case FamilyKind::Gamma:
      return p0_ / p1_;
    case FamilyKind::Triangular:
      return 0.5;
    case FamilyKind::Linear:
      return p0_ / 3.0 + p1_ / 2.0;
    case FamilyKind::DiscreteUniform: {
      double acc = 0.0;
      for (double p : points_) acc += p;
      return acc / static_cast<double>(points_.size());
    }
    case FamilyKind::Binomial:
      return p0_ * p1_;
    case FamilyKind::Geometric:
      return (1.0 - p0_) / p0_;
    case FamilyKind::Poisson:
      return p0_;
    case FamilyKind::PointMass:
      return p0_;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double DensityFamily::variance() const {
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta: {
      const double ab = p0_ + p1_;
      return p2_ * p2_ * p0_ * p1_ / (ab * ab * (ab + 1.0));
    }
    case FamilyKind::Uniform:
      return (p1_ - p0_) * (p1_ - p0_) / 12.0;
    case FamilyKind::TruncatedExponential: {
      const double t = p0_;
      const double c = p1_;
      const double second =
          (2.0 / (t * t) - std::exp(-t * c) * (c * c + 2.0 * c / t + 2.0 / (t * t))) /
          -std::expm1(-t * c);
      const double m = mean();
      return second - m * m;
    }
    case FamilyKind::Exponential:
      return 1.0 / (p0_ * p0_);
    case FamilyKind::Gamma:
      return p0_ / (p1_ * p1_);
    case FamilyKind::Triangular:
      return 1.0 / 24.0;
    case FamilyKind::Linear: {
      const double m = mean();
      return p0_ / 4.0 + p1_ / 3.0 - m * m;
    }
    case FamilyKind::DiscreteUniform: {
      const double m = mean();
      double acc = 0.0;
      for (double p : points_) acc += (p - m) * (p - m);
      return acc / static_cast<double>(points_.size());
    }
    case FamilyKind::Binomial:
      return p0_ * p1_ * (1.0 - p1_);
    case FamilyKind::Geometric:
      return (1.0 - p0_) / (p0_ * p0_);
    case FamilyKind::Poisson:
      return p0_;
    case FamilyKind::PointMass:
      return 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<Atom> DensityFamily::atoms() const {
  std::vector<Atom> out;
  switch (kind_) {
    case FamilyKind::DiscreteUniform: {
      const double w = 1.0 / static_cast<double>(points_.size());
      for (double p : points_) out.push_back({p, w});
      return out;
    }
    case FamilyKind::Binomial: {
      const int n = static_cast<int>(p0_);
      for (int k = 0; k <= n; ++k) out.push_back({static_cast<double>(k), pdf(k)});
      return out;
    }
    case FamilyKind::Geometric:
    case FamilyKind::Poisson: {
      const long last = static_cast<long>(upper_quantile(kEnumerationTail));
      double total = 0.0;
      for (long k = 0; k <= last; ++k) {
        out.push_back({static_cast<double>(k), pdf(static_cast<double>(k))});
        total += out.back().weight;
      }
      for (Atom& a : out) a.weight /= total;
      return out;
    }
    case FamilyKind::PointMass:
      out.push_back({p0_, 1.0});
      return out;
    default:
      return out;
  }
}

double DensityFamily::upper_quantile(double tail) const {
  const Support s = support();
  if (s.bounded()) return s.hi;
  switch (kind_) {
    case FamilyKind::Exponential:
      return -std::log(tail) / p0_;
    case FamilyKind::Gamma:
      return boost::math::gamma_q_inv(p0_, tail) / p1_;
    case FamilyKind::Geometric:
      // P(X > k) = (1-p)^{k+1}
      return std::max(0.0, std::ceil(std::log(tail) / std::log1p(-p0_)) - 1.0);
    case FamilyKind::Poisson: {
      boost::math::poisson_distribution<double> dist(p0_);
      return boost::math::quantile(boost::math::complement(dist, tail));
    }
    default:
      return s.hi;
  }
}

DensityFamily DensityFamily::from_parameters(FamilyKind kind, const std::vector<double>& v) {
  auto need = [&](std::size_t n) {
    if (v.size() != n) {
      throw DomainError(to_string(kind) + ": expected " + std::to_string(n) + " parameters, got " +
                        std::to_string(v.size()));
    }
  };
  switch (kind) {
    case FamilyKind::Beta: need(2); return beta(v[0], v[1]);
    case FamilyKind::ScaledBeta: need(3); return scaled_beta(v[0], v[1], v[2]);
    case FamilyKind::Uniform: need(2); return uniform(v[0], v[1]);
    case FamilyKind::TruncatedExponential: need(2); return truncated_exponential(v[0], v[1]);
    case FamilyKind::Exponential: need(1); return exponential(v[0]);
    case FamilyKind::Gamma: need(2); return gamma(v[0], v[1]);
    case FamilyKind::Triangular: need(0); return triangular();
    case FamilyKind::Linear: need(2); return linear(v[0], v[1]);
    case FamilyKind::DiscreteUniform: return discrete_uniform(v);
    case FamilyKind::Binomial: need(2); return binomial(static_cast<int>(std::lround(v[0])), v[1]);
    case FamilyKind::Geometric: need(1); return geometric(v[0]);
    case FamilyKind::Poisson: need(1); return poisson(v[0]);
    case FamilyKind::PointMass: need(1); return point_mass(v[0]);
  }
  throw DomainError("from_parameters: unknown family");
}

std::vector<std::pair<std::string, double>> DensityFamily::parameters() const {
  switch (kind_) {
    case FamilyKind::Beta: return {{"alpha", p0_}, {"beta", p1_}};
    case FamilyKind::ScaledBeta: return {{"alpha", p0_}, {"beta", p1_}, {"upper", p2_}};
    case FamilyKind::Uniform: return {{"lo", p0_}, {"hi", p1_}};
    case FamilyKind::TruncatedExponential: return {{"theta", p0_}, {"upper", p1_}};
    case FamilyKind::Exponential: return {{"theta", p0_}};
    case FamilyKind::Gamma: return {{"a", p0_}, {"theta", p1_}};
    case FamilyKind::Triangular: return {};
    case FamilyKind::Linear: return {{"a1", p0_}, {"a0", p1_}};
    case FamilyKind::DiscreteUniform: {
      std::vector<std::pair<std::string, double>> out;
      for (std::size_t i = 0; i < points_.size(); ++i) {
        out.emplace_back("point" + std::to_string(i), points_[i]);
      }
      return out;
    }
    case FamilyKind::Binomial: return {{"n", p0_}, {"p", p1_}};
    case FamilyKind::Geometric: return {{"p", p0_}};
    case FamilyKind::Poisson: return {{"nu", p0_}};
    case FamilyKind::PointMass: return {{"x", p0_}};
  }
  return {};
}

double DensityFamily::linear_inverse_cdf(double u) const {
  // Root of a1 x^2 / 2 + a0 x = u in [0, 1], written without cancellation.
  const double a1 = p0_;
  const double a0 = p1_;
  const double disc = std::max(0.0, a0 * a0 + 2.0 * a1 * u);
  const double denom = a0 + std::sqrt(disc);
  return denom > 0.0 ? std::clamp(2.0 * u / denom, 0.0, 1.0) : 1.0;
}

}  // namespace resetfpt
