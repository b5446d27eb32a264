#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "resetfpt/densities.hpp"

namespace resetfpt {

/// A position that is either fixed or drawn from a law.
using PositionLaw = std::variant<double, DensityFamily>;

inline bool is_fixed(const PositionLaw& p) { return std::holds_alternative<double>(p); }

/// Poissonian resetting at `rate` to `position`.
struct ResetSpec {
  double rate = 0.0;
  PositionLaw position = 0.0;
};

enum class EstimateMethod { Analytic, Quadrature, MonteCarlo };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::Analytic: return "analytic";
    case EstimateMethod::Quadrature: return "quadrature";
    case EstimateMethod::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

/// Numerical result with its uncertainty. For Monte Carlo `std_error` is the
/// standard error; for quadrature it is the error estimate.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;
  EstimateMethod method = EstimateMethod::Analytic;
  double censored_fraction = 0.0;
  std::string warning;
};

}  // namespace resetfpt
