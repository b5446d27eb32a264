#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/geometric_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace resetfpt {

enum class FamilyKind {
  Beta,
  ScaledBeta,
  Uniform,
  TruncatedExponential,
  Exponential,
  Gamma,
  Triangular,
  Linear,
  DiscreteUniform,
  Binomial,
  Geometric,
  Poisson,
  PointMass,
};

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Closed support [lo, hi]; hi may be +inf.
struct Support {
  double lo = 0.0;
  double hi = 0.0;
  bool bounded() const { return std::isfinite(hi); }
};

/// One atom of a discrete law.
struct Atom {
  double x;
  double weight;
};

/// Immutable parametric probability law on the real line, used as the law of
/// a random initial position or a random reset position.
class DensityFamily {
 public:
  // Beta(alpha, beta) on (0, 1).
  static DensityFamily beta(double alpha, double beta);
  // Beta(alpha, beta) stretched onto (0, upper).
  static DensityFamily scaled_beta(double alpha, double beta, double upper);
  static DensityFamily uniform(double lo, double hi);
  // theta * exp(-theta x) / (1 - exp(-theta c)) on (0, c).
  static DensityFamily truncated_exponential(double theta, double upper);
  static DensityFamily exponential(double theta);
  // Shape a, rate theta.
  static DensityFamily gamma(double a, double theta);
  // 4x on (0, 1/2), 4 - 4x on [1/2, 1).
  static DensityFamily triangular();
  // a1 x + a0 on (0, 1); requires a1 / 2 + a0 = 1 and nonnegativity.
  static DensityFamily linear(double a1, double a0);
  static DensityFamily discrete_uniform(std::vector<double> points);
  static DensityFamily binomial(int n, double p);
  // P(k) = p (1 - p)^k, k = 0, 1, ...
  static DensityFamily geometric(double p);
  static DensityFamily poisson(double nu);
  static DensityFamily point_mass(double x);
  /// Law of `kind` from the values of parameters(), in order. Binomial n is
  /// rounded; Triangular takes no values.
  static DensityFamily from_parameters(FamilyKind kind, const std::vector<double>& values);

  FamilyKind kind() const { return kind_; }
  bool is_discrete() const;
  Support support() const;

  /// Density (continuous) or probability mass at an atom (discrete).
  double pdf(double x) const;
  double cdf(double x) const;

  /// E[exp(-s X)]. Throws DomainError when s is outside the convergence strip.
  double laplace(double s) const;
  /// Complex argument with Re s inside the strip; used by contour inversion.
  std::complex<double> laplace(std::complex<double> s) const;
  /// Lower end of the convergence strip: laplace(s) is finite for s > bound.
  /// -inf for bounded supports.
  double laplace_lower_bound() const;

  double mean() const;
  double variance() const;

  /// Enumerated atoms. Poisson and geometric supports are cut at the
  /// 1 - 1e-14 quantile and the kept weights renormalized.
  std::vector<Atom> atoms() const;

  /// Point beyond which at most `tail` probability remains (hi for bounded).
  double upper_quantile(double tail) const;

  /// Named parameters in a fixed order (the JSON field names).
  std::vector<std::pair<std::string, double>> parameters() const;
  const std::vector<double>& points() const { return points_; }

  template <class URBG>
  double sample(URBG& g) const;

  bool operator==(const DensityFamily& other) const = default;

 private:
  DensityFamily(FamilyKind kind, double p0 = 0.0, double p1 = 0.0, double p2 = 0.0)
      : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}

  double beta_mgf(double t) const;
  double linear_inverse_cdf(double u) const;

  FamilyKind kind_;
  // Meaning per kind:
  //   Beta: alpha, beta, 1 | ScaledBeta: alpha, beta, upper | Uniform: lo, hi
  //   TruncatedExponential: theta, upper | Exponential: theta | Gamma: a, theta
  //   Linear: a1, a0 | Binomial: n, p | Geometric: p | Poisson: nu | PointMass: x
  double p0_;
  double p1_;
  double p2_;
  std::vector<double> points_;
};

template <class URBG>
double DensityFamily::sample(URBG& g) const {
  boost::random::uniform_01<double> unit;
  switch (kind_) {
    case FamilyKind::Beta:
    case FamilyKind::ScaledBeta:
      return p2_ * boost::random::beta_distribution<double>(p0_, p1_)(g);
    case FamilyKind::Uniform:
      return p0_ + (p1_ - p0_) * unit(g);
    case FamilyKind::TruncatedExponential: {
      const double u = unit(g);
      return -std::log1p(u * std::expm1(-p0_ * p1_)) / p0_;
    }
    case FamilyKind::Exponential:
      return -std::log1p(-unit(g)) / p0_;
    case FamilyKind::Gamma:
      return boost::random::gamma_distribution<double>(p0_, 1.0 / p1_)(g);
    case FamilyKind::Triangular: {
      const double u = unit(g);
      return u < 0.5 ? std::sqrt(u / 2.0) : 1.0 - std::sqrt((1.0 - u) / 2.0);
    }
    case FamilyKind::Linear:
      return linear_inverse_cdf(unit(g));
    case FamilyKind::DiscreteUniform: {
      boost::random::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
      return points_[pick(g)];
    }
    case FamilyKind::Binomial:
      return boost::random::binomial_distribution<int>(static_cast<int>(p0_), p1_)(g);
    case FamilyKind::Geometric:
      // boost's geometric counts failures before the first success.
      return boost::random::geometric_distribution<int>(p0_)(g);
    case FamilyKind::Poisson:
      return boost::random::poisson_distribution<int>(p0_)(g);
    case FamilyKind::PointMass:
      return p0_;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace resetfpt
