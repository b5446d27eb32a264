#include "resetfpt/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "resetfpt/errors.hpp"
#include "resetfpt/forward.hpp"
#include "resetfpt/laplace.hpp"
#include "resetfpt/rng.hpp"

namespace resetfpt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
// Least-squares runs stop once the objective is this small.
constexpr double kObjectiveFloor = 1e-28;

using ScalarMap = std::function<double(const DensityFamily&)>;

void require_within(const DensityFamily& law, double lo, double hi, const char* who) {
  const Support s = law.support();
  if (!(s.lo >= lo && s.hi <= hi)) {
    std::ostringstream os;
    os << who << ": support [" << s.lo << ", " << s.hi << "] must lie in [" << lo << ", " << hi
       << "]";
    throw DomainError(os.str());
  }
}

// The interpolated BVP solution has derivative kinks at every grid node, so
// adaptive quadrature stalls short of its default tolerance; the grid error
// dominates anyway.
const QuadOptions kGridIntegrand{1e-9, 1e-14, 40, 4000, false};

// Forward map of a scalar problem. The BVP of a general model does not
// depend on the law, so it is solved once here.
ScalarMap scalar_forward(InverseKind kind, const InverseSetting& s) {
  const bool initial = s.which == InverseCase::RandomInitial;
  switch (kind) {
    case InverseKind::IFPP:
      if (!initial) {
        return [s](const DensityFamily& h) { return q_case2(h, s.x, s.mu, s.r, s.b).value; };
      }
      if (s.conjugation) {
        return [s](const DensityFamily& g) {
          return q_case1_conjugated(g, *s.conjugation, s.r, s.x_reset, s.lo, s.b).value;
        };
      }
      if (s.model) {
        auto sol = std::make_shared<BvpSolution>(
            bvp_solve(*s.model, s.lo, s.b, s.r, s.x_reset, BvpTarget::ExitProbability));
        return [s, sol](const DensityFamily& g) {
          require_within(g, s.lo, s.b, "IFPP");
          return mixture_integral(g, [&](double x) { return std::clamp((*sol)(x), 0.0, 1.0); },
                                  kGridIntegrand)
              .value;
        };
      }
      return [s](const DensityFamily& g) { return q_case1(g, s.mu, s.r, s.x_reset, s.b).value; };
    case InverseKind::IMFPT:
      if (initial) {
        return [s](const DensityFamily& g) { return mean_fpt_case1(g, s.mu, s.r, s.x_reset).value; };
      }
      return [s](const DensityFamily& h) { return mean_fpt_case2(h, s.x, s.mu, s.r).value; };
    case InverseKind::IMFET:
      if (initial) {
        return [s](const DensityFamily& g) {
          return mean_fet_case1(g, s.mu, s.r, s.x_reset, s.b).value;
        };
      }
      return [s](const DensityFamily& h) { return mean_fet_case2(h, s.x, s.mu, s.r, s.b).value; };
    case InverseKind::IFPT:
      break;
  }
  throw DomainError("forward_value: IFPT has no scalar forward value");
}

// Objective value, with laws the forward map rejects ranked last.
double guarded(const std::function<double()>& f) {
  try {
    return f();
  } catch (const DomainError&) {
    return kInf;
  }
}

std::vector<std::vector<double>> range_points(const SearchSpace& space, const InverseOptions& opts) {
  const Box& box = space.box();
  const std::size_t d = space.dim();
  std::vector<std::vector<double>> pts;
  if (d == 1) {
    const int n = opts.range_grid + 1;
    for (int i = 0; i <= n; ++i) {
      pts.push_back({box.lo[0] + (box.hi[0] - box.lo[0]) * i / n});
    }
    return pts;
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<double> p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = (mask >> i) & 1U ? box.hi[i] : box.lo[i];
    pts.push_back(p);
  }
  PhiloxStream rng(opts.optim.seed, 0x52414e4745ULL);
  for (int k = 0; k < opts.range_grid; ++k) {
    std::vector<double> p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng.uniform();
    pts.push_back(p);
  }
  return pts;
}

std::vector<std::pair<std::string, double>> fitted_values(const SearchSpace& space,
                                                          const std::vector<double>& x) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.emplace_back(space.free_names()[i], x[i]);
  return out;
}

OptimOptions least_squares(const InverseOptions& opts) {
  OptimOptions o = opts.optim;
  o.stop_value = std::max(o.stop_value, kObjectiveFloor);
  return o;
}

InverseSolution solve_scalar(InverseKind kind, double target, const InverseSetting& setting,
                             const SearchSpace& space, const InverseOptions& opts) {
  const ScalarMap fwd = scalar_forward(kind, setting);
  const bool probability = kind == InverseKind::IFPP;
  const double exact = opts.exact_psi * (probability ? 1.0 : std::max(1.0, target * target));
  InverseSolution sol;
  sol.objective = ObjectiveKind::PsiSquare;
  sol.target = target;
  auto psi = [&](double v) { return (target - v) * (target - v); };

  // Sampled forward range.
  RangeCertificate cert;
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  if (space.is_candidate_list()) {
    for (const auto& law : space.candidate_list()) {
      vals.push_back(guarded([&] { return fwd(law); }));
    }
  } else {
    pts = range_points(space, opts);
    for (const auto& p : pts) vals.push_back(guarded([&] { return fwd(space.build(p)); }));
  }
  cert.evaluations = static_cast<int>(vals.size());
  cert.lo = kInf;
  cert.hi = -kInf;
  for (double v : vals) {
    if (std::isfinite(v)) {
      cert.lo = std::min(cert.lo, v);
      cert.hi = std::max(cert.hi, v);
    }
  }
  if (!(cert.lo <= cert.hi)) throw DomainError("inverse: forward map undefined on the whole search space");
  if (space.dim() == 1 && !space.is_candidate_list()) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      up = up && vals[i + 1] >= vals[i];
      down = down && vals[i + 1] <= vals[i];
    }
    cert.monotone = up || down;
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(target));
  const bool outside = target < cert.lo - slack || target > cert.hi + slack;
  if (outside && !probability) {
    std::ostringstream os;
    os << to_string(kind) << ": target " << target << " outside the attainable range [" << cert.lo
       << ", " << cert.hi << "] of the search space";
    throw RangeError(os.str(), cert.lo, cert.hi);
  }

  if (space.is_candidate_list()) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (psi(vals[i]) < psi(vals[best])) best = i;
    }
    sol.family = space.candidate_list()[best];
    sol.fitted = sol.family.parameters();
    sol.residual = psi(vals[best]);
    sol.iterations = static_cast<int>(vals.size());
    sol.converged = true;
  } else if (space.dim() == 1 && !outside) {
    // Root of the residual on the first sampled bracket.
    std::size_t bracket = vals.size();
    int brackets = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      const double a = vals[i] - target;
      const double b = vals[i + 1] - target;
      if (std::isfinite(a) && std::isfinite(b) && (a == 0.0 || a * b < 0.0)) {
        if (bracket == vals.size()) bracket = i;
        ++brackets;
      }
    }
    if (bracket == vals.size() && vals.back() == target) bracket = vals.size() - 2;
    double x;
    if (bracket == vals.size()) {
      // Target touches the range only between samples; fall back to Psi.
      const OptimResult r = minimize(
          [&](const std::vector<double>& p) { return guarded([&] { return psi(fwd(space.build(p))); }); },
          space.box(), least_squares(opts), space.start());
      x = r.x[0];
      sol.iterations = r.iterations;
    } else if (vals[bracket] == target) {
      x = pts[bracket][0];
    } else {
      x = find_root([&](double p) { return fwd(space.build({p})) - target; }, pts[bracket][0],
                    pts[bracket + 1][0]);
    }
    sol.family = space.build({x});
    sol.fitted = fitted_values(space, {x});
    sol.residual = psi(fwd(sol.family));
    sol.converged = true;
    sol.locally_unique = cert.monotone;
    if (brackets > 1) sol.warning = "forward map not monotone on the box; first root returned";
  } else {
    const OptimResult r = minimize(
        [&](const std::vector<double>& p) { return guarded([&] { return psi(fwd(space.build(p))); }); },
        space.box(), least_squares(opts), space.start());
    sol.family = space.build(r.x);
    sol.fitted = fitted_values(space, r.x);
    sol.residual = r.value;
    sol.iterations = r.iterations;
    sol.converged = r.converged;
    sol.locally_unique = r.hessian_positive_definite;
  }
  sol.replay = fwd(sol.family);
  if (sol.residual < exact) {
    sol.status = SolutionStatus::Exact;
  } else if (outside) {
    sol.status = SolutionStatus::NoSolutionInClass;
    sol.certificate = cert;
  } else {
    sol.status = SolutionStatus::Approximate;
  }
  return sol;
}

// a1 coefficient of E[e^{d eta}] for eta ~ a1 x + 1 - a1 / 2 on (0, 1).
double linear_weight(double d) {
  if (std::abs(d) < 1e-3) return d / 12.0 + d * d / 24.0 + d * d * d / 80.0;
  return (std::exp(d) * (d - 2.0) + 2.0 + d) / (2.0 * d * d);
}

double expm1_ratio(double d) { return d == 0.0 ? 1.0 : std::expm1(d) / d; }

}  // namespace

const char* to_string(InverseKind kind) {
  switch (kind) {
    case InverseKind::IFPP: return "ifpp";
    case InverseKind::IFPT: return "ifpt";
    case InverseKind::IMFPT: return "imfpt";
    case InverseKind::IMFET: return "imfet";
  }
  return "unknown";
}

const char* to_string(InverseCase c) {
  return c == InverseCase::RandomInitial ? "random-initial" : "random-reset";
}

const char* to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::PsiSquare: return "psi-square";
    case ObjectiveKind::TransformL2: return "transform-l2";
    case ObjectiveKind::MomentMatch: return "moment-match";
  }
  return "unknown";
}

const char* to_string(SolutionStatus status) {
  switch (status) {
    case SolutionStatus::Exact: return "exact";
    case SolutionStatus::Approximate: return "approximate";
    case SolutionStatus::NoSolutionInClass: return "no-solution-in-class";
  }
  return "unknown";
}

InverseKind inverse_kind_from_string(const std::string& name) {
  for (InverseKind k : {InverseKind::IFPP, InverseKind::IFPT, InverseKind::IMFPT, InverseKind::IMFET}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown inverse problem kind '" + name + "'");
}

InverseCase inverse_case_from_string(const std::string& name) {
  for (InverseCase c : {InverseCase::RandomInitial, InverseCase::RandomReset}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown inverse case '" + name + "'");
}

SearchSpace SearchSpace::parametric(const DensityFamily& start, std::vector<std::string> free,
                                    Box box, std::vector<std::pair<std::string, std::string>> ties) {
  SearchSpace s;
  s.kind_ = start.kind();
  for (const auto& [name, value] : start.parameters()) {
    s.names_.push_back(name);
    s.base_.push_back(value);
  }
  auto index = [&](const std::string& name) {
    const auto it = std::find(s.names_.begin(), s.names_.end(), name);
    if (it == s.names_.end()) {
      throw ConfigError("search space: " + to_string(s.kind_) + " has no parameter '" + name + "'");
    }
    return static_cast<std::size_t>(it - s.names_.begin());
  };
  if (free.empty()) throw ConfigError("search space: no free parameters");
  if (box.lo.size() != free.size() || box.hi.size() != free.size()) {
    throw ConfigError("search space: box dimension must match the free parameters");
  }
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (!(box.lo[i] < box.hi[i]) || !std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i])) {
      throw ConfigError("search space: box bounds must be finite with lo < hi");
    }
    s.free_.push_back(index(free[i]));
  }
  s.free_names_ = std::move(free);
  for (const auto& [dst, src] : ties) s.ties_.emplace_back(index(dst), index(src));
  s.box_ = std::move(box);
  return s;
}

SearchSpace SearchSpace::candidates(std::vector<DensityFamily> list) {
  if (list.empty()) throw ConfigError("search space: empty candidate list");
  SearchSpace s;
  s.kind_ = list.front().kind();
  s.candidates_ = std::move(list);
  return s;
}

DensityFamily SearchSpace::build(const std::vector<double>& x) const {
  if (is_candidate_list()) throw DomainError("search space: candidate lists have no parameters");
  if (x.size() != free_.size()) throw DomainError("search space: wrong number of parameters");
  std::vector<double> v = base_;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double tol = 1e-12 * (box_.hi[i] - box_.lo[i]);
    if (!(x[i] >= box_.lo[i] - tol && x[i] <= box_.hi[i] + tol)) {
      throw DomainError("search space: parameter " + free_names_[i] + " outside its box");
    }
    v[free_[i]] = std::clamp(x[i], box_.lo[i], box_.hi[i]);
  }
  for (const auto& [dst, src] : ties_) v[dst] = v[src];
  if (kind_ == FamilyKind::Linear) {
    const bool a1_free = std::find(free_.begin(), free_.end(), 0) != free_.end();
    if (a1_free) {
      v[1] = 1.0 - v[0] / 2.0;
    } else {
      v[0] = 2.0 * (1.0 - v[1]);
    }
  }
  return DensityFamily::from_parameters(kind_, v);
}

std::vector<double> SearchSpace::start() const {
  std::vector<double> x;
  for (std::size_t i = 0; i < free_.size(); ++i) {
    x.push_back(std::clamp(base_[free_[i]], box_.lo[i], box_.hi[i]));
  }
  return x;
}

FptLawSpec FptLawSpec::from_transform(std::function<double(double)> fhat) {
  FptLawSpec s;
  s.representation = Representation::TransformClosure;
  s.transform = std::move(fhat);
  return s;
}

FptLawSpec FptLawSpec::from_samples(std::vector<double> times) {
  FptLawSpec s;
  s.representation = Representation::EmpiricalSamples;
  s.samples = std::move(times);
  return s;
}

FptLawSpec FptLawSpec::from_moments(std::vector<double> raw) {
  FptLawSpec s;
  s.representation = Representation::MomentVector;
  s.moments = std::move(raw);
  return s;
}

double forward_value(InverseKind kind, const InverseSetting& setting, const DensityFamily& law) {
  return scalar_forward(kind, setting)(law);
}

InverseSolution solve_ifpp(double q, const InverseSetting& setting, const SearchSpace& space,
                           const InverseOptions& opts) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("solve_ifpp: q must lie in (0, 1)");
  return solve_scalar(InverseKind::IFPP, q, setting, space, opts);
}

InverseSolution solve_imfpt(double m, const InverseSetting& setting, const SearchSpace& space,
                            const InverseOptions& opts) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("solve_imfpt: m must be > 0");
  return solve_scalar(InverseKind::IMFPT, m, setting, space, opts);
}

InverseSolution solve_imfet(double m, const InverseSetting& setting, const SearchSpace& space,
                            const InverseOptions& opts) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("solve_imfet: m must be > 0");
  return solve_scalar(InverseKind::IMFET, m, setting, space, opts);
}

LinearIfpp ifpp_linear_closed_form(double q, double mu, double r, double x_reset) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("ifpp_linear_closed_form: q must lie in (0, 1)");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ifpp_linear_closed_form: r must be > 0");
  const BmResetCoefficients c = bm_coefficients(mu, r, x_reset, 1.0);
  const double e1 = std::exp(c.d1);
  const double e2 = std::exp(c.d2);
  const double num = q - c.c1 * expm1_ratio(c.d1) - c.c2 * expm1_ratio(c.d2) + c.c1 * e1 + c.c2 * e2;
  const double den = c.c1 * linear_weight(c.d1) + c.c2 * linear_weight(c.d2);
  const double scale = std::abs(c.c1 * linear_weight(c.d1)) + std::abs(c.c2 * linear_weight(c.d2));
  if (!std::isfinite(num) || !std::isfinite(den) || !(std::abs(den) > 1e-14 * scale)) {
    throw DegenerateError("ifpp_linear_closed_form: the coefficient of a1 vanishes");
  }
  LinearIfpp out;
  out.a1 = num / den;
  out.a0 = 1.0 - out.a1 / 2.0;
  if (out.a0 < 0.0 || out.a1 + out.a0 < 0.0) {
    std::ostringstream os;
    os << "a1 x + a0 = " << out.a1 << " x + " << out.a0
       << " is negative on part of (0, 1); not a density";
    out.warning = os.str();
  }
  return out;
}

double ifpt_ghat_from_fhat(double theta, const std::function<double(double)>& fhat, double mu,
                           double r, double x_reset) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ifpt_ghat_from_fhat: r must be > 0");
  const double s = std::sqrt(mu * mu + 2.0 * r);
  if (std::abs(theta - mu - s) <= 1e-6 || std::abs(theta - mu + s) <= 1e-6) {
    std::ostringstream os;
    os << "ifpt_ghat_from_fhat: theta = " << theta << " within 1e-6 of a root of theta^2/2 - r - theta mu";
    throw SingularityError(os.str());
  }
  // lambda = (theta - mu - s)(theta - mu + s) / 2, factored to keep relative accuracy.
  const double lambda = 0.5 * (theta - mu - s) * (theta - mu + s);
  if (lambda < 0.0) throw DomainError("ifpt_ghat_from_fhat: induced lambda is negative");
  if (theta < mu) {
    throw DomainError("ifpt_ghat_from_fhat: lower branch; fhat determines ghat at the conjugate root");
  }
  const double k = r * std::exp(-theta * x_reset);
  return ((lambda + k) * fhat(lambda) - k) / lambda;
}

InverseSolution solve_ifpt(const FptLawSpec& target, const InverseSetting& setting,
                           const SearchSpace& space, const InverseOptions& opts) {
  const bool initial = setting.which == InverseCase::RandomInitial;
  auto model_lt = [&](double lambda, const DensityFamily& law) {
    return initial ? fpt_lt_case1(lambda, law, setting.mu, setting.r, setting.x_reset).value
                   : fpt_lt_case2(lambda, law, setting.x, setting.mu, setting.r).value;
  };
  std::function<double(const DensityFamily&)> objective;
  InverseSolution sol;
  std::vector<double> grid;
  std::vector<double> weight;
  std::vector<double> goal;
  if (target.representation == FptLawSpec::Representation::MomentVector) {
    const auto& m = target.moments;
    if (m.empty() || m.size() > 4) throw DomainError("solve_ifpt: need 1 to 4 target moments");
    if (!(m[0] > 0.0)) throw DomainError("solve_ifpt: target mean must be > 0");
    if (m.size() >= 2 && !(m[1] - m[0] * m[0] > 0.0)) {
      throw DomainError("solve_ifpt: target variance must be > 0");
    }
    sol.objective = ObjectiveKind::MomentMatch;
    const int order = static_cast<int>(m.size());
    objective = [&, order](const DensityFamily& law) {
      const Moments mm = moments_from_lt([&](double l) { return model_lt(l, law); }, order);
      double acc = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double rel = (mm.raw[static_cast<std::size_t>(k)] - m[static_cast<std::size_t>(k) - 1]) /
                           m[static_cast<std::size_t>(k) - 1];
        acc += rel * rel;
      }
      return acc;
    };
  } else {
    sol.objective = ObjectiveKind::TransformL2;
    const int n = opts.lambda_points;
    if (n < 2 || !(opts.lambda_lo > 0.0) || !(opts.lambda_hi > opts.lambda_lo)) {
      throw ConfigError("solve_ifpt: bad lambda grid");
    }
    for (int j = 0; j < n; ++j) {
      const double l = opts.lambda_lo * std::pow(opts.lambda_hi / opts.lambda_lo, double(j) / (n - 1));
      grid.push_back(l);
      weight.push_back(1.0 / (1.0 + l));
    }
    if (target.representation == FptLawSpec::Representation::TransformClosure) {
      if (!target.transform) throw DomainError("solve_ifpt: missing target transform");
      const double f0 = target.transform(0.0);
      if (!(std::abs(f0 - 1.0) <= 1e-6)) {
        std::ostringstream os;
        os << "solve_ifpt: target transform at 0 is " << f0 << ", not 1";
        throw DomainError(os.str());
      }
      for (double l : grid) {
        const double v = target.transform(l);
        if (!(v > 0.0 && v <= 1.0 + 1e-12)) throw DomainError("solve_ifpt: target transform leaves (0, 1]");
        goal.push_back(v);
      }
    } else {
      if (target.samples.empty()) throw DomainError("solve_ifpt: no target samples");
      for (double t : target.samples) {
        if (!(t >= 0.0)) throw DomainError("solve_ifpt: sample times must be >= 0");
      }
      for (double l : grid) {
        double acc = 0.0;
        for (double t : target.samples) acc += std::exp(-l * t);
        goal.push_back(acc / static_cast<double>(target.samples.size()));
      }
    }
    objective = [&](const DensityFamily& law) {
      double acc = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double d = goal[j] - model_lt(grid[j], law);
        acc += weight[j] * d * d;
      }
      return acc;
    };
  }

  if (space.is_candidate_list()) {
    double best = kInf;
    for (const auto& law : space.candidate_list()) {
      const double v = guarded([&] { return objective(law); });
      if (v < best || sol.iterations == 0) {
        best = v;
        sol.family = law;
      }
      ++sol.iterations;
    }
    sol.fitted = sol.family.parameters();
    sol.residual = best;
    sol.converged = std::isfinite(best);
  } else {
    const OptimResult r = minimize(
        [&](const std::vector<double>& p) { return guarded([&] { return objective(space.build(p)); }); },
        space.box(), least_squares(opts), space.start());
    sol.family = space.build(r.x);
    sol.fitted = fitted_values(space, r.x);
    sol.residual = r.value;
    sol.iterations = r.iterations;
    sol.converged = r.converged;
    sol.locally_unique = r.hessian_positive_definite;
  }
  sol.replay = kNaN;
  sol.target = kNaN;
  sol.status = sol.residual < opts.exact_transform ? SolutionStatus::Exact : SolutionStatus::Approximate;
  return sol;
}

}  // namespace resetfpt
