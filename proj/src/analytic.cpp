#include "resetfpt/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <boost/math/interpolators/makima.hpp>

#include "resetfpt/errors.hpp"

namespace resetfpt {
namespace {

// Above this exponent the expm1 forms overflow and we switch to scaled sums.
constexpr double kExpCeiling = 700.0;
constexpr double kEdgeTol = 1e-12;

struct ExpTerm {
  double sign;
  double exponent;
};

// sum(sign_i e^{a_i}) / sum(sign_j e^{b_j}) with every term scaled by the
// largest exponent present, so neither sum overflows.
double exp_sum_ratio(std::initializer_list<ExpTerm> num, std::initializer_list<ExpTerm> den) {
  double m = -std::numeric_limits<double>::infinity();
  for (const ExpTerm& t : num) m = std::max(m, t.exponent);
  for (const ExpTerm& t : den) m = std::max(m, t.exponent);
  double n = 0.0;
  double d = 0.0;
  for (const ExpTerm& t : num) n += t.sign * std::exp(t.exponent - m);
  for (const ExpTerm& t : den) d += t.sign * std::exp(t.exponent - m);
  return n / d;
}

void check_interval(double x, double x_reset, double b, const char* who) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError(std::string(who) + ": interval end b must be positive and finite");
  }
  if (!(x_reset > 0.0 && x_reset < b)) {
    std::ostringstream os;
    os << who << ": reset position x_R=" << x_reset << " must lie in (0, " << b << ")";
    throw DomainError(os.str());
  }
  if (!(x >= -kEdgeTol * b && x <= b * (1.0 + kEdgeTol))) {
    std::ostringstream os;
    os << who << ": x=" << x << " outside [0, " << b << "]";
    throw DomainError(os.str());
  }
}

void check_rate(double r, const char* who) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError(std::string(who) + ": reset rate must be finite and >= 0");
  }
}

// Denominator of c1 = 1/D; finite regime only.
double exit_denominator(double d1, double d2, double x_reset, double b) {
  return -std::expm1(d1 * b) + std::exp(x_reset * (d1 - d2)) * std::expm1(d2 * b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Conjugation maps and models

ConjugationMap ConjugationMap::identity(double drift) {
  ConjugationMap m;
  m.name = "identity";
  m.v = [](double x) { return x; };
  m.v_inverse = [](double y) { return y; };
  m.v_prime = [](double) { return 1.0; };
  m.drift = drift;
  return m;
}

ConjugationMap ConjugationMap::feller() {
  ConjugationMap m;
  m.name = "feller";
  m.v = [](double x) { return 2.0 * std::sqrt(std::max(x, 0.0)); };
  m.v_inverse = [](double y) { return 0.25 * y * y; };
  m.v_prime = [](double x) { return 1.0 / std::sqrt(x); };
  m.image_lo = 0.0;
  return m;
}

ConjugationMap ConjugationMap::wright_fisher() {
  ConjugationMap m;
  m.name = "wright_fisher";
  m.v = [](double x) { return 2.0 * std::asin(std::sqrt(std::clamp(x, 0.0, 1.0))); };
  m.v_inverse = [](double y) {
    const double s = std::sin(0.5 * y);
    return s * s;
  };
  m.v_prime = [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); };
  m.image_lo = 0.0;
  m.image_hi = M_PI;
  return m;
}

ConjugationMap ConjugationMap::logarithmic(double theta, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("logarithmic map: sigma must be > 0");
  ConjugationMap m;
  m.name = "logarithmic";
  m.v = [sigma](double x) { return std::log(x) / sigma; };
  m.v_inverse = [sigma](double y) { return std::exp(sigma * y); };
  m.v_prime = [sigma](double x) { return 1.0 / (sigma * x); };
  m.drift = (theta - 0.5 * sigma * sigma) / sigma;
  return m;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::BrownianDrift: return "brownian_drift";
    case ModelKind::OrnsteinUhlenbeck: return "ornstein_uhlenbeck";
    case ModelKind::GeometricBM: return "geometric_bm";
    case ModelKind::Feller: return "feller";
    case ModelKind::WrightFisher: return "wright_fisher";
    case ModelKind::Custom: return "custom";
  }
  return "unknown";
}

DiffusionModel DiffusionModel::brownian_drift(double mu) {
  if (!std::isfinite(mu)) throw DomainError("brownian_drift: mu must be finite");
  DiffusionModel m;
  m.kind_ = ModelKind::BrownianDrift;
  m.description_ = "dX = mu dt + dW";
  m.params_ = {mu};
  m.drift_ = [mu](double) { return mu; };
  m.sigma_ = [](double) { return 1.0; };
  return m;
}

DiffusionModel DiffusionModel::ornstein_uhlenbeck(double nu, double sigma) {
  if (!(nu > 0.0 && sigma > 0.0)) throw DomainError("ornstein_uhlenbeck: nu, sigma must be > 0");
  DiffusionModel m;
  m.kind_ = ModelKind::OrnsteinUhlenbeck;
  m.description_ = "dX = -nu X dt + sigma dW";
  m.params_ = {nu, sigma};
  m.drift_ = [nu](double x) { return -nu * x; };
  m.sigma_ = [sigma](double) { return sigma; };
  return m;
}

DiffusionModel DiffusionModel::geometric_bm(double theta, double sigma) {
  if (!std::isfinite(theta) || !(sigma > 0.0)) {
    throw DomainError("geometric_bm: theta finite and sigma > 0 required");
  }
  DiffusionModel m;
  m.kind_ = ModelKind::GeometricBM;
  m.description_ = "dX = theta X dt + sigma X dW";
  m.params_ = {theta, sigma};
  m.drift_ = [theta](double x) { return theta * x; };
  m.sigma_ = [sigma](double x) { return sigma * x; };
  return m;
}

DiffusionModel DiffusionModel::feller() {
  DiffusionModel m;
  m.kind_ = ModelKind::Feller;
  m.description_ = "dX = dt/4 + sqrt(X) dW";
  m.drift_ = [](double) { return 0.25; };
  m.sigma_ = [](double x) { return std::sqrt(std::max(x, 0.0)); };
  return m;
}

DiffusionModel DiffusionModel::wright_fisher() {
  DiffusionModel m;
  m.kind_ = ModelKind::WrightFisher;
  m.description_ = "dX = (1/4 - X/2) dt + sqrt(X (1 - X)) dW";
  m.drift_ = [](double x) { return 0.25 - 0.5 * x; };
  m.sigma_ = [](double x) { return std::sqrt(std::max(x * (1.0 - x), 0.0)); };
  return m;
}

DiffusionModel DiffusionModel::custom(std::function<double(double)> drift,
                                      std::function<double(double)> sigma,
                                      std::string description) {
  if (!drift || !sigma) throw DomainError("custom model: drift and sigma must be callable");
  DiffusionModel m;
  m.kind_ = ModelKind::Custom;
  m.description_ = std::move(description);
  m.drift_ = std::move(drift);
  m.sigma_ = std::move(sigma);
  return m;
}

DiffusionModel DiffusionModel::tabulated(std::vector<double> x, std::vector<double> mu,
                                         std::vector<double> sigma) {
  if (x.size() < 4 || mu.size() != x.size() || sigma.size() != x.size()) {
    throw DomainError("tabulated model: need >= 4 nodes and equal-length x, mu, sigma");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("tabulated model: x must be strictly increasing");
  }
  const double lo = x.front();
  const double hi = x.back();
  using Makima = boost::math::interpolators::makima<std::vector<double>>;
  auto mu_fit = std::make_shared<Makima>(std::vector<double>(x), std::move(mu));
  auto sigma_fit = std::make_shared<Makima>(std::move(x), std::move(sigma));
  auto in_range = [lo, hi](double v) {
    if (v < lo - 1e-12 || v > hi + 1e-12) {
      std::ostringstream os;
      os << "tabulated model evaluated at " << v << " outside its table [" << lo << ", " << hi
         << "]";
      throw DomainError(os.str());
    }
    return std::clamp(v, lo, hi);
  };
  return custom([mu_fit, in_range](double v) { return (*mu_fit)(in_range(v)); },
                [sigma_fit, in_range](double v) { return (*sigma_fit)(in_range(v)); },
                "tabulated");
}

std::optional<ConjugationMap> DiffusionModel::conjugation() const {
  switch (kind_) {
    case ModelKind::BrownianDrift: return ConjugationMap::identity(params_[0]);
    case ModelKind::GeometricBM: return ConjugationMap::logarithmic(params_[0], params_[1]);
    case ModelKind::Feller: return ConjugationMap::feller();
    case ModelKind::WrightFisher: return ConjugationMap::wright_fisher();
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Drifted Brownian motion closed forms

std::pair<double, double> bm_exponents(double mu, double r) {
  const double s = std::sqrt(mu * mu + 2.0 * r);
  if (s == 0.0) return {0.0, 0.0};
  if (mu >= 0.0) return {-mu - s, 2.0 * r / (mu + s)};
  return {-2.0 * r / (s - mu), -mu + s};
}

double passage_exponent(double mu, double s) {
  const double root = std::sqrt(mu * mu + 2.0 * s);
  if (mu >= 0.0) return mu + root;
  return 2.0 * s / (root - mu);
}

std::complex<double> passage_exponent(double mu, std::complex<double> s) {
  const std::complex<double> root = std::sqrt(mu * mu + 2.0 * s);
  if (mu >= 0.0) return mu + root;
  return 2.0 * s / (root - mu);
}

BmResetCoefficients bm_coefficients(double mu, double r, double x_reset, double b) {
  check_rate(r, "bm_coefficients");
  if (!(r > 0.0)) throw DomainError("bm_coefficients: reset rate must be > 0");
  check_interval(x_reset, x_reset, b, "bm_coefficients");
  BmResetCoefficients c;
  std::tie(c.d1, c.d2) = bm_exponents(mu, r);
  const double a = x_reset * (c.d1 - c.d2);
  const double den = exit_denominator(c.d1, c.d2, x_reset, b);
  c.c1 = 1.0 / den;
  c.c2 = -c.c1 * std::exp(a);
  const double s = std::sqrt(2.0 * r);
  const double den0 = exit_denominator(-s, s, x_reset, b);
  c.c1p = 1.0 / den0;
  c.c2p = -c.c1p * std::exp(-2.0 * s * x_reset);
  const double pref = std::exp(-c.d2 * x_reset) / r / den;
  c.C1 = -pref * std::expm1(c.d2 * b);
  c.C2 = pref * std::expm1(c.d1 * b);
  c.pi0_at_reset = pi0_bm(x_reset, mu, r, x_reset, b);
  if (std::abs(c.d1 * c.d2 + 2.0 * r) > 1e-12 * std::max(1.0, 2.0 * r) ||
      std::abs(c.d1 + c.d2 + 2.0 * mu) > 1e-12 * std::max(1.0, std::abs(2.0 * mu))) {
    throw NumericalError("bm_coefficients: exponent identities violated");
  }
  return c;
}

double pi0_classical(double x, double mu, double b) {
  if (!(b > 0.0) || !(x >= -kEdgeTol * b && x <= b * (1.0 + kEdgeTol))) {
    std::ostringstream os;
    os << "pi0_classical: x=" << x << " outside [0, " << b << "]";
    throw DomainError(os.str());
  }
  x = std::clamp(x, 0.0, b);
  if (std::abs(mu) < 1e-7) return (1.0 - x / b) * (1.0 - mu * x);
  if (mu > 0.0) {
    return (std::expm1(-2.0 * mu * x) - std::expm1(-2.0 * mu * b)) / -std::expm1(-2.0 * mu * b);
  }
  return std::expm1(2.0 * mu * (b - x)) / std::expm1(2.0 * mu * b);
}

double pi0_bm(double x, double mu, double r, double x_reset, double b) {
  check_rate(r, "pi0_bm");
  if (r == 0.0) return pi0_classical(x, mu, b);
  check_interval(x, x_reset, b, "pi0_bm");
  x = std::clamp(x, 0.0, b);
  const auto [d1, d2] = bm_exponents(mu, r);
  const double a = x_reset * (d1 - d2);
  double value;
  if (d2 * b <= kExpCeiling) {
    const double num = std::exp(d1 * x) * -std::expm1(d1 * (b - x)) +
                       std::exp(a + d2 * x) * std::expm1(d2 * (b - x));
    value = num / exit_denominator(d1, d2, x_reset, b);
  } else {
    value = exp_sum_ratio({{1, d1 * x}, {-1, d1 * b}, {-1, a + d2 * x}, {1, a + d2 * b}},
                          {{1, 0.0}, {-1, d1 * b}, {-1, a}, {1, a + d2 * b}});
  }
  return std::clamp(value, 0.0, 1.0);
}

double mean_fpt_bm(double x, double mu, double r, double x_reset) {
  check_rate(r, "mean_fpt_bm");
  if (r == 0.0) throw DomainError("mean_fpt_bm: requires r > 0");
  if (!(x >= 0.0) || !(x_reset >= 0.0)) {
    throw DomainError("mean_fpt_bm: x and x_R must be >= 0");
  }
  const double k = passage_exponent(mu, r);
  return -std::expm1(-x * k) * std::exp(x_reset * k) / r;
}

namespace {

// expm1 is not defined for complex arguments.
std::complex<double> expm1_c(std::complex<double> z) {
  if (std::abs(z) < 1e-5) return z + 0.5 * z * z + z * z * z / 6.0;
  return std::exp(z) - 1.0;
}

}  // namespace

double fpt_lt_bm(double lambda, double x, double mu, double r, double x_reset) {
  check_rate(r, "fpt_lt_bm");
  if (!(x >= 0.0) || !(x_reset >= 0.0)) throw DomainError("fpt_lt_bm: x and x_R must be >= 0");
  if (mu * mu + 2.0 * (lambda + r) < 0.0) {
    throw DomainError("fpt_lt_bm: lambda below the convergence abscissa");
  }
  if (x == 0.0) return 1.0;
  if (lambda == 0.0 && r > 0.0) return 1.0;
  const double k = passage_exponent(mu, lambda + r);
  const double tail = -std::expm1(-x * k);
  if (r == 0.0) return 1.0 - tail;
  // 1 - (1 - C) (1 - e^{-xk}) with 1 - C = lambda / (lambda + r e^{-x_R k}).
  return 1.0 - lambda / (lambda + r * std::exp(-x_reset * k)) * tail;
}

std::complex<double> fpt_lt_bm(std::complex<double> lambda, double x, double mu, double r,
                               double x_reset) {
  check_rate(r, "fpt_lt_bm");
  if (x == 0.0) return 1.0;
  const std::complex<double> k = passage_exponent(mu, lambda + r);
  const std::complex<double> e = r * std::exp(-x_reset * k);
  const std::complex<double> tail = -expm1_c(-x * k);
  if (r == 0.0) return 1.0 - tail;
  return 1.0 - lambda / (lambda + e) * tail;
}

double mean_fet_bm(double x, double mu, double r, double x_reset, double b) {
  check_rate(r, "mean_fet_bm");
  if (r == 0.0) throw DomainError("mean_fet_bm: requires r > 0");
  check_interval(x, x_reset, b, "mean_fet_bm");
  x = std::clamp(x, 0.0, b);
  const auto [d1, d2] = bm_exponents(mu, r);
  const double a = x_reset * (d1 - d2);
  double value;
  if (d2 * b <= kExpCeiling) {
    const double num = -std::expm1(d2 * b) * std::expm1(d1 * x) +
                       std::expm1(d1 * b) * std::expm1(d2 * x);
    value = std::exp(-d2 * x_reset) * num / exit_denominator(d1, d2, x_reset, b) / r;
  } else {
    const double s = -d2 * x_reset;
    value = exp_sum_ratio({{-1, s + d2 * b + d1 * x},
                           {1, s + d2 * b},
                           {1, s + d1 * x},
                           {1, s + d1 * b + d2 * x},
                           {-1, s + d1 * b},
                           {-1, s + d2 * x}},
                          {{1, 0.0}, {-1, d1 * b}, {-1, a}, {1, a + d2 * b}}) /
            r;
  }
  return std::max(value, 0.0);
}

// ---------------------------------------------------------------------------
// Conjugated densities

ConjugatedDensity::ConjugatedDensity(ConjugationMap map, DensityFamily base)
    : map_(std::move(map)), base_(std::move(base)) {
  const Support s = base_.support();
  if (s.lo < map_.image_lo - 1e-12 || s.hi > map_.image_hi + 1e-12) {
    std::ostringstream os;
    os << "conjugate_transform: base support [" << s.lo << ", " << s.hi
       << "] leaves the image of the " << map_.name << " map [" << map_.image_lo << ", "
       << map_.image_hi << "]";
    throw DomainError(os.str());
  }
}

double ConjugatedDensity::pdf(double x) const {
  if (base_.is_discrete()) return base_.pdf(map_.v(x));
  const Support s = support();
  if (x < s.lo || x > s.hi) return 0.0;
  return base_.pdf(map_.v(x)) * map_.v_prime(x);
}

std::vector<Atom> ConjugatedDensity::atoms() const {
  std::vector<Atom> out = base_.atoms();
  for (Atom& a : out) a.x = map_.v_inverse(a.x);
  return out;
}

Support ConjugatedDensity::support() const {
  const Support s = base_.support();
  return {map_.v_inverse(s.lo),
          std::isfinite(s.hi) ? map_.v_inverse(s.hi) : std::numeric_limits<double>::infinity()};
}

ConjugatedDensity conjugate_transform(const ConjugationMap& map, const DensityFamily& base) {
  return ConjugatedDensity(map, base);
}

double pi0_conjugated(double x, const ConjugationMap& map, double r, double x_reset, double lo,
                      double hi) {
  if (!(x >= lo && x <= hi)) {
    std::ostringstream os;
    os << "pi0_conjugated: x=" << x << " outside [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
  const double shift = map.v(lo);
  return pi0_bm(map.v(x) - shift, map.drift, r, map.v(x_reset) - shift, map.v(hi) - shift);
}

}  // namespace resetfpt
