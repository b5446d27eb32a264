#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "resetfpt/analytic.hpp"
#include "resetfpt/types.hpp"

namespace resetfpt {

struct SimConfig {
  std::size_t n_paths = 100000;
  double dt = 1e-4;
  // Censoring horizon; NaN selects 50 times a reference time (see default_horizon).
  double t_max = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 1;
  // Pairs paths (2k, 2k+1) with negated Brownian increments.
  bool antithetic = false;
  // Brownian-bridge crossing correction between grid points.
  bool bridge = true;
  // 0 reads RESET_FPT_THREADS, falling back to the hardware count.
  int threads = 0;
};

/// Censored mass above this fraction raises a warning on the estimate.
constexpr double kCensoringWarning = 1e-3;

struct FptSamples {
  // One entry per path, in path order; +inf marks a censored path.
  std::vector<double> times;
  double t_max = 0.0;
  std::size_t censored = 0;
  bool antithetic = false;
  Estimate mean;
};

struct ExitResult {
  Estimate pi0;
  Estimate mean_fet;
  FptSamples times;
};

/// First passage of the diffusion with resetting through `barrier` from above.
FptSamples simulate_fpt(const DiffusionModel& model, const PositionLaw& start,
                        const ResetSpec& reset, double barrier, const SimConfig& cfg);

/// First exit from (lo, hi): exit probability through lo and mean exit time.
ExitResult simulate_exit(const DiffusionModel& model, const PositionLaw& start,
                         const ResetSpec& reset, double lo, double hi, const SimConfig& cfg);

/// Sample mean of e^{-lambda tau} with censored paths contributing 0, a lower
/// bound. Adding censored_fraction * e^{-lambda t_max} gives the upper bound.
Estimate estimate_lt(const FptSamples& samples, double lambda);

/// 50 times the analytic mean when available for drifted BM with fixed
/// positions, else 50 / r, else 50 (width)^2.
double default_horizon(const DiffusionModel& model, const PositionLaw& start,
                       const ResetSpec& reset, double lo, double hi);

/// Worker count from RESET_FPT_THREADS (>= 1), else the hardware concurrency.
int worker_count(int requested = 0);

void write_samples_binary(const std::string& path, const FptSamples& samples);
void write_samples_csv(const std::string& path, const FptSamples& samples);

}  // namespace resetfpt
