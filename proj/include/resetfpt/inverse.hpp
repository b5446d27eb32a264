#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resetfpt/analytic.hpp"
#include "resetfpt/densities.hpp"
#include "resetfpt/optimize.hpp"

namespace resetfpt {

enum class InverseKind { IFPP, IFPT, IMFPT, IMFET };
// RandomInitial: eta ~ g, fixed x_R. RandomReset: fixed x, x_R ~ h.
enum class InverseCase { RandomInitial, RandomReset };
enum class ObjectiveKind { PsiSquare, TransformL2, MomentMatch };
enum class SolutionStatus { Exact, Approximate, NoSolutionInClass };

const char* to_string(InverseKind kind);
const char* to_string(InverseCase c);
const char* to_string(ObjectiveKind kind);
const char* to_string(SolutionStatus status);
InverseKind inverse_kind_from_string(const std::string& name);
InverseCase inverse_case_from_string(const std::string& name);

/// Fixed quantities of the forward map. `b` is the right end of (0, b) for
/// exit problems; `x` is the start (RandomReset), `x_reset` the reset
/// position (RandomInitial).
struct InverseSetting {
  InverseCase which = InverseCase::RandomInitial;
  double mu = 0.0;
  double r = 1.0;
  double x_reset = 0.0;
  double x = 0.0;
  double b = 1.0;
  // RandomInitial exit probability of a general diffusion on (lo, b), from the BVP.
  std::optional<DiffusionModel> model;
  // RandomInitial exit probability of a conjugated diffusion on (lo, b); the
  // searched law then lives on the v-scale, shifted by v(lo).
  std::optional<ConjugationMap> conjugation;
  double lo = 0.0;
};

/// Laws searched by a solver: either a family with some parameters free
/// inside a box, or a finite list of candidates.
class SearchSpace {
 public:
  /// `free` names parameters of `start` that vary; `ties` makes the first
  /// name of each pair copy the second. For Linear, a0 follows a1 (or the
  /// reverse) through a1 / 2 + a0 = 1.
  static SearchSpace parametric(const DensityFamily& start, std::vector<std::string> free, Box box,
                                std::vector<std::pair<std::string, std::string>> ties = {});
  static SearchSpace candidates(std::vector<DensityFamily> list);

  bool is_candidate_list() const { return !candidates_.empty(); }
  const std::vector<DensityFamily>& candidate_list() const { return candidates_; }
  FamilyKind kind() const { return kind_; }
  const std::vector<std::string>& free_names() const { return free_names_; }
  const Box& box() const { return box_; }
  std::size_t dim() const { return free_.size(); }

  /// Law at free-parameter values x. Throws DomainError when x leaves the box.
  DensityFamily build(const std::vector<double>& x) const;
  std::vector<double> start() const;

 private:
  FamilyKind kind_ = FamilyKind::PointMass;
  std::vector<std::string> names_;
  std::vector<double> base_;
  std::vector<std::size_t> free_;
  std::vector<std::string> free_names_;
  std::vector<std::pair<std::size_t, std::size_t>> ties_;
  Box box_;
  std::vector<DensityFamily> candidates_;
};

/// Target law of the first-passage time.
struct FptLawSpec {
  enum class Representation { TransformClosure, EmpiricalSamples, MomentVector };
  Representation representation = Representation::TransformClosure;
  std::function<double(double)> transform;
  std::vector<double> samples;
  // Raw moments m_1, m_2, ...
  std::vector<double> moments;

  static FptLawSpec from_transform(std::function<double(double)> fhat);
  static FptLawSpec from_samples(std::vector<double> times);
  static FptLawSpec from_moments(std::vector<double> raw);
};

/// Forward range of a search space, used to certify non-existence.
struct RangeCertificate {
  double lo = 0.0;
  double hi = 0.0;
  // One-parameter families: whether the sampled forward map is monotone.
  bool monotone = false;
  int evaluations = 0;
};

struct InverseSolution {
  DensityFamily family = DensityFamily::point_mass(0.0);
  std::vector<std::pair<std::string, double>> fitted;  // free parameters
  double residual = 0.0;
  ObjectiveKind objective = ObjectiveKind::PsiSquare;
  SolutionStatus status = SolutionStatus::Approximate;
  int iterations = 0;
  bool converged = false;
  // Hessian of the objective positive definite at the optimum (local uniqueness).
  bool locally_unique = false;
  std::optional<RangeCertificate> certificate;
  // Forward value recomputed from the fitted law (q or mean); NaN for IFPT.
  double replay = 0.0;
  double target = 0.0;
  std::string warning;
};

struct InverseOptions {
  OptimOptions optim;
  // Interior points added to the box endpoints when sampling the forward range.
  int range_grid = 64;
  double exact_psi = 1e-12;
  double exact_transform = 1e-10;
  // TransformL2 grid: log-spaced in [lambda_lo, lambda_hi], weights 1 / (1 + lambda).
  int lambda_points = 32;
  double lambda_lo = 1e-3;
  double lambda_hi = 1e3;
};

/// q, E[tau] or E[tau_{0,b}] of `law` under `setting`. IFPT has no scalar value.
double forward_value(InverseKind kind, const InverseSetting& setting, const DensityFamily& law);

/// Minimizes Psi = (q - E[pi0])^2. A residual below exact_psi is an exact
/// solution; otherwise, when the sampled forward range excludes q, the
/// status is NoSolutionInClass with the range as certificate.
InverseSolution solve_ifpp(double q, const InverseSetting& setting, const SearchSpace& space,
                           const InverseOptions& opts = {});

struct LinearIfpp {
  double a1 = 0.0;
  double a0 = 0.0;
  // Set when a1 x + a0 is negative somewhere on (0, 1).
  std::string warning;
};

/// The unique a1 x + a0 on (0, 1) with a1 / 2 + a0 = 1 reaching q for drifted
/// BM with resetting and b = 1. DegenerateError when the a1 coefficient vanishes.
LinearIfpp ifpp_linear_closed_form(double q, double mu, double r, double x_reset);

/// Transform of the initial-position law recovered from the FPT transform,
/// for theta above mu + sqrt(mu^2 + 2r). SingularityError within 1e-6 of
/// either root of theta^2 / 2 - r - theta mu; DomainError where that value is
/// negative or on the lower branch, where fhat determines ghat at the
/// conjugate root instead.
double ifpt_ghat_from_fhat(double theta, const std::function<double(double)>& fhat, double mu,
                           double r, double x_reset);

/// TransformL2 (closure or samples) or MomentMatch (moments) fit of the FPT law.
InverseSolution solve_ifpt(const FptLawSpec& target, const InverseSetting& setting,
                           const SearchSpace& space, const InverseOptions& opts = {});

/// E[tau] = m. One free parameter: bracketed root on the sampled range;
/// several: Psi least squares. RangeError with the sampled range when m lies outside it.
InverseSolution solve_imfpt(double m, const InverseSetting& setting, const SearchSpace& space,
                            const InverseOptions& opts = {});
/// E[tau_{0,b}] = m, as solve_imfpt.
InverseSolution solve_imfet(double m, const InverseSetting& setting, const SearchSpace& space,
                            const InverseOptions& opts = {});

}  // namespace resetfpt
