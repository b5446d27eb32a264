#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "resetfpt/densities.hpp"

namespace resetfpt {

/// Increasing map v with v(origin) = 0 turning the diffusion into Brownian
/// motion with constant drift `drift` and unit diffusion coefficient.
struct ConjugationMap {
  std::string name;
  std::function<double(double)> v;
  std::function<double(double)> v_inverse;
  std::function<double(double)> v_prime;
  double drift = 0.0;
  // Range of v; base laws handed to ConjugatedDensity must live inside it.
  double image_lo = -std::numeric_limits<double>::infinity();
  double image_hi = std::numeric_limits<double>::infinity();

  static ConjugationMap identity(double drift = 0.0);
  // v(x) = 2 sqrt(x) for dX = dt/4 + sqrt(X) dW.
  static ConjugationMap feller();
  // v(x) = 2 asin(sqrt(x)) for dX = (1/4 - X/2) dt + sqrt(X(1 - X)) dW.
  static ConjugationMap wright_fisher();
  // v(x) = ln(x) / sigma for geometric Brownian motion.
  static ConjugationMap logarithmic(double theta, double sigma);
};

enum class ModelKind { BrownianDrift, OrnsteinUhlenbeck, GeometricBM, Feller, WrightFisher, Custom };

std::string to_string(ModelKind kind);

/// dX = mu(X) dt + sigma(X) dW.
class DiffusionModel {
 public:
  static DiffusionModel brownian_drift(double mu);
  // dX = -nu X dt + sigma dW.
  static DiffusionModel ornstein_uhlenbeck(double nu, double sigma);
  // dX = theta X dt + sigma X dW.
  static DiffusionModel geometric_bm(double theta, double sigma);
  static DiffusionModel feller();
  static DiffusionModel wright_fisher();
  static DiffusionModel custom(std::function<double(double)> drift,
                               std::function<double(double)> sigma, std::string description);
  // Coefficients interpolated (modified Akima) through the given nodes.
  static DiffusionModel tabulated(std::vector<double> x, std::vector<double> mu,
                                  std::vector<double> sigma);

  ModelKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  double drift(double x) const { return drift_(x); }
  double sigma(double x) const { return sigma_(x); }
  // Constant drift of BrownianDrift; first parameter of the other built-ins.
  double param(int i) const { return params_.at(static_cast<std::size_t>(i)); }

  /// Map to Brownian motion, when the model has one.
  std::optional<ConjugationMap> conjugation() const;

 private:
  DiffusionModel() = default;
  ModelKind kind_ = ModelKind::Custom;
  std::string description_;
  std::vector<double> params_;
  std::function<double(double)> drift_;
  std::function<double(double)> sigma_;
};

/// Constants of the drifted-BM closed forms on (0, b) with reset to x_R at rate r.
struct BmResetCoefficients {
  double d1 = 0.0;
  double d2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c1p = 0.0;  // mu = 0 variants
  double c2p = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double pi0_at_reset = 0.0;
};

/// d1 = -mu - sqrt(mu^2 + 2r), d2 = -mu + sqrt(mu^2 + 2r), each without cancellation.
std::pair<double, double> bm_exponents(double mu, double r);

/// mu + sqrt(mu^2 + 2 s), evaluated without cancellation for mu < 0.
double passage_exponent(double mu, double s);
std::complex<double> passage_exponent(double mu, std::complex<double> s);

BmResetCoefficients bm_coefficients(double mu, double r, double x_reset, double b);

/// Probability that drifted BM with resetting started at x leaves (0, b) through 0.
double pi0_bm(double x, double mu, double r, double x_reset, double b);
/// Same without resetting.
double pi0_classical(double x, double mu, double b);

/// E[tau(x)] for passage through 0 from x >= 0; requires r > 0.
double mean_fpt_bm(double x, double mu, double r, double x_reset);
/// E[exp(-lambda tau(x))].
double fpt_lt_bm(double lambda, double x, double mu, double r, double x_reset);
std::complex<double> fpt_lt_bm(std::complex<double> lambda, double x, double mu, double r,
                               double x_reset);
/// E[tau_{0,b}(x)], the mean first-exit time from (0, b).
double mean_fet_bm(double x, double mu, double r, double x_reset, double b);

/// Density of v^{-1}(Y) where Y follows `base` on the transformed scale.
class ConjugatedDensity {
 public:
  ConjugatedDensity(ConjugationMap map, DensityFamily base);
  double pdf(double x) const;
  // Atoms mapped back through v^{-1}; empty for continuous bases.
  std::vector<Atom> atoms() const;
  Support support() const;
  template <class URBG>
  double sample(URBG& g) const { return map_.v_inverse(base_.sample(g)); }
  const DensityFamily& base() const { return base_; }
  const ConjugationMap& map() const { return map_; }

 private:
  ConjugationMap map_;
  DensityFamily base_;
};

ConjugatedDensity conjugate_transform(const ConjugationMap& map, const DensityFamily& base);

/// pi0 of a conjugated diffusion on (lo, hi), computed through pi0_bm on the v-scale.
double pi0_conjugated(double x, const ConjugationMap& map, double r, double x_reset, double lo,
                      double hi);

// ---------------------------------------------------------------------------
// Nonlocal boundary-value problem
//   (1/2) sigma^2 f'' + mu f' + r (f(x_R) - f) = -forcing,  f(lo), f(hi) given.

enum class BvpTarget { ExitProbability, MeanExitTime };

struct BvpOptions {
  // (f(lo), f(hi)); defaults are (1, 0) for exit probability, (0, 0) for exit time.
  std::optional<std::pair<double, double>> boundary;
  double change_tol = 1e-8;
  int min_intervals = 64;
  int max_intervals = 1 << 16;
};

struct BvpSolution {
  std::vector<double> x;
  std::vector<double> f;
  double kappa = 0.0;             // solver's value of f(x_R)
  double residual = 0.0;          // sup of the discrete equation residual
  double refinement_change = 0.0; // sup change on the last grid doubling
  double nonlocal_gap = 0.0;      // |f(x_R) - kappa|
  double order = 0.0;             // observed convergence order
  bool reset_on_grid = false;
  int intervals = 0;

  /// Local cubic interpolation of the grid solution.
  double operator()(double x) const;
};

BvpSolution bvp_solve(const DiffusionModel& model, double lo, double hi, double r,
                      double x_reset, BvpTarget target, const BvpOptions& opts = {});

}  // namespace resetfpt
