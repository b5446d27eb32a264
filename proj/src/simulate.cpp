#include "resetfpt/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "resetfpt/errors.hpp"
#include "resetfpt/rng.hpp"

namespace resetfpt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Bridge crossing probabilities below e^{-36} are not sampled.
constexpr double kBridgeCutoff = 18.0;

struct PathOutcome {
  double time;
  int side;  // 0: lower end, 1: upper end, -1: censored
};

struct ConstCoeff {
  double mu;
  double sigma;
  double drift(double) const { return mu; }
  double diffusion(double) const { return sigma; }
};

struct ModelCoeff {
  const DiffusionModel* model;
  double drift(double x) const { return model->drift(x); }
  double diffusion(double x) const { return model->sigma(x); }
};

struct PathSetup {
  const PositionLaw* start;
  const ResetSpec* reset;
  double lo;
  double hi;
  double dt;
  double t_max;
  bool bridge;
};

double draw_position(const PositionLaw& law, PhiloxStream& g) {
  if (const double* x = std::get_if<double>(&law)) return *x;
  return std::get<DensityFamily>(law).sample(g);
}

template <class Coeff>
PathOutcome run_path(const Coeff& c, const PathSetup& s, PhiloxStream& g, bool negate) {
  boost::random::normal_distribution<double> normal;
  const double r = s.reset->rate;
  boost::random::exponential_distribution<double> clock(r > 0.0 ? r : 1.0);
  const double sqrt_dt = std::sqrt(s.dt);

  double x = draw_position(*s.start, g);
  if (x <= s.lo) return {0.0, 0};
  if (x >= s.hi) return {0.0, 1};
  double t = 0.0;
  double next_reset = r > 0.0 ? clock(g) : kInf;

  for (;;) {
    double step = s.dt;
    double root = sqrt_dt;
    bool at_reset = false;
    bool at_end = false;
    if (t + step >= next_reset) {
      step = next_reset - t;
      at_reset = true;
    }
    if (t + step >= s.t_max) {
      step = s.t_max - t;
      at_end = true;
      at_reset = false;
    }
    if (step != s.dt) root = std::sqrt(step);

    const double mu = c.drift(x);
    const double sig = c.diffusion(x);
    double z = normal(g);
    if (negate) z = -z;
    const double xn = x + mu * step + sig * root * z;

    if (xn <= s.lo) return {t + step * (x - s.lo) / (x - xn), 0};
    if (xn >= s.hi) return {t + step * (s.hi - x) / (xn - x), 1};
    if (s.bridge) {
      const double v = sig * sig * step;
      const double a_lo = (x - s.lo) * (xn - s.lo);
      if (a_lo < kBridgeCutoff * v && g.uniform() < std::exp(-2.0 * a_lo / v)) {
        return {t + 0.5 * step, 0};
      }
      const double a_hi = (s.hi - x) * (s.hi - xn);
      if (a_hi < kBridgeCutoff * v && g.uniform() < std::exp(-2.0 * a_hi / v)) {
        return {t + 0.5 * step, 1};
      }
    }
    t += step;
    x = xn;
    if (at_end) return {s.t_max, -1};
    if (at_reset) {
      x = draw_position(s.reset->position, g);
      next_reset = t + clock(g);
    }
  }
}

std::vector<PathOutcome> run_paths(const DiffusionModel& model, const PathSetup& setup,
                                   const SimConfig& cfg) {
  std::vector<PathOutcome> out(cfg.n_paths);
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 256;
  const bool constant = model.kind() == ModelKind::BrownianDrift;
  const ConstCoeff cc{constant ? model.param(0) : 0.0, 1.0};
  const ModelCoeff mc{&model};

  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= cfg.n_paths) return;
      const std::size_t end = std::min(cfg.n_paths, begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) {
        // Antithetic partners share a stream; the odd member negates its increments.
        const std::uint64_t stream = cfg.antithetic ? i / 2 : i;
        const bool negate = cfg.antithetic && (i % 2 == 1);
        PhiloxStream g(cfg.seed, stream);
        out[i] = constant ? run_path(cc, setup, g, negate) : run_path(mc, setup, g, negate);
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(worker_count(cfg.threads),
                                                  static_cast<int>(cfg.n_paths / kChunk) + 1));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

void validate(const DiffusionModel& model, const PositionLaw& start, const ResetSpec& reset,
              double lo, double hi, const SimConfig& cfg) {
  if (cfg.n_paths < 1) throw ConfigError("simulate: n_paths must be >= 1");
  if (cfg.antithetic && cfg.n_paths % 2 != 0) {
    throw ConfigError("simulate: antithetic sampling needs an even n_paths");
  }
  if (!(cfg.dt > 0.0)) throw ConfigError("simulate: dt must be > 0");
  if (!(reset.rate >= 0.0) || !std::isfinite(reset.rate)) {
    throw ConfigError("simulate: reset rate must be finite and >= 0");
  }
  auto inside = [&](double v) { return v > lo && v < hi; };
  if (reset.rate > 0.0) {
    if (const double* xr = std::get_if<double>(&reset.position)) {
      if (!inside(*xr)) throw ConfigError("simulate: reset position must lie strictly inside the domain");
    } else {
      const Support s = std::get<DensityFamily>(reset.position).support();
      if (s.lo < lo || s.hi > hi || (s.lo == lo && std::get<DensityFamily>(reset.position).is_discrete())) {
        std::ostringstream os;
        os << "simulate: reset law support [" << s.lo << ", " << s.hi
           << "] must lie inside the domain (" << lo << ", " << hi << ")";
        throw ConfigError(os.str());
      }
    }
  }
  if (const double* x0 = std::get_if<double>(&start)) {
    if (*x0 < lo || *x0 > hi) throw ConfigError("simulate: start outside the domain");
  } else {
    const Support s = std::get<DensityFamily>(start).support();
    if (s.lo < lo || s.hi > hi) throw ConfigError("simulate: start law support outside the domain");
  }
  (void)model;
}

double resolved_horizon(const DiffusionModel& model, const PositionLaw& start,
                        const ResetSpec& reset, double lo, double hi, const SimConfig& cfg) {
  const double t_max =
      std::isnan(cfg.t_max) ? default_horizon(model, start, reset, lo, hi) : cfg.t_max;
  if (!(cfg.dt < t_max)) throw ConfigError("simulate: dt must be smaller than t_max");
  return t_max;
}

// Mean and standard error of the per-path values selected by `use`. With
// antithetic pairs the error is computed from pair averages.
template <class Value, class Use>
Estimate sample_mean(std::size_t n, bool antithetic, Value value, Use use) {
  Estimate e;
  e.method = EstimateMethod::MonteCarlo;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!use(i)) continue;
    sum += value(i);
    ++count;
  }
  e.n_effective = count;
  if (count == 0) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.value = sum / static_cast<double>(count);
  double ss = 0.0;
  std::size_t units = 0;
  if (antithetic) {
    for (std::size_t i = 0; i + 1 < n; i += 2) {
      if (!use(i) || !use(i + 1)) continue;
      const double d = 0.5 * (value(i) + value(i + 1)) - e.value;
      ss += d * d;
      ++units;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!use(i)) continue;
      const double d = value(i) - e.value;
      ss += d * d;
    }
    units = count;
  }
  e.std_error = units > 1 ? std::sqrt(ss / static_cast<double>(units - 1) / static_cast<double>(units))
                          : 0.0;
  return e;
}

void flag_censoring(Estimate& e, double fraction) {
  e.censored_fraction = fraction;
  if (fraction > kCensoringWarning) {
    std::ostringstream os;
    os << "censored fraction " << fraction << " exceeds " << kCensoringWarning;
    e.warning = os.str();
  }
}

}  // namespace

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RESET_FPT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double default_horizon(const DiffusionModel& model, const PositionLaw& start,
                       const ResetSpec& reset, double lo, double hi) {
  auto typical = [](const PositionLaw& p) {
    if (const double* x = std::get_if<double>(&p)) return *x;
    return std::get<DensityFamily>(p).mean();
  };
  double ref = std::numeric_limits<double>::quiet_NaN();
  if (model.kind() == ModelKind::BrownianDrift) {
    const double mu = model.param(0);
    const double x0 = typical(start) - lo;
    try {
      if (reset.rate > 0.0) {
        const double xr = typical(reset.position) - lo;
        ref = std::isfinite(hi) ? mean_fet_bm(std::clamp(x0, 0.0, hi - lo), mu, reset.rate,
                                              std::clamp(xr, 1e-12 * (hi - lo), (hi - lo) * (1 - 1e-12)),
                                              hi - lo)
                                : mean_fpt_bm(x0, mu, reset.rate, xr);
      } else if (!std::isfinite(hi) && mu < 0.0) {
        ref = x0 / -mu;
      }
    } catch (const DomainError&) {
      ref = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (!(ref > 0.0) || !std::isfinite(ref)) {
    if (reset.rate > 0.0) ref = 1.0 / reset.rate;
    else if (std::isfinite(hi)) ref = (hi - lo) * (hi - lo);
    else ref = std::max(1.0, typical(start) * typical(start));
  }
  return 50.0 * ref;
}

FptSamples simulate_fpt(const DiffusionModel& model, const PositionLaw& start,
                        const ResetSpec& reset, double barrier, const SimConfig& cfg) {
  validate(model, start, reset, barrier, kInf, cfg);
  PathSetup setup{&start, &reset, barrier, kInf, cfg.dt, 0.0, cfg.bridge};
  setup.t_max = resolved_horizon(model, start, reset, barrier, kInf, cfg);
  const auto paths = run_paths(model, setup, cfg);

  FptSamples out;
  out.t_max = setup.t_max;
  out.antithetic = cfg.antithetic;
  out.times.resize(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out.times[i] = paths[i].side < 0 ? kInf : paths[i].time;
    if (paths[i].side < 0) ++out.censored;
  }
  out.mean = sample_mean(
      paths.size(), cfg.antithetic, [&](std::size_t i) { return out.times[i]; },
      [&](std::size_t i) { return std::isfinite(out.times[i]); });
  flag_censoring(out.mean, static_cast<double>(out.censored) / static_cast<double>(paths.size()));
  return out;
}

ExitResult simulate_exit(const DiffusionModel& model, const PositionLaw& start,
                         const ResetSpec& reset, double lo, double hi, const SimConfig& cfg) {
  if (!(hi > lo)) throw ConfigError("simulate_exit: need lo < hi");
  validate(model, start, reset, lo, hi, cfg);
  PathSetup setup{&start, &reset, lo, hi, cfg.dt, 0.0, cfg.bridge};
  setup.t_max = resolved_horizon(model, start, reset, lo, hi, cfg);
  const auto paths = run_paths(model, setup, cfg);

  ExitResult out;
  out.times.t_max = setup.t_max;
  out.times.antithetic = cfg.antithetic;
  out.times.times.resize(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    out.times.times[i] = paths[i].side < 0 ? kInf : paths[i].time;
    if (paths[i].side < 0) ++out.times.censored;
  }
  const double cf = static_cast<double>(out.times.censored) / static_cast<double>(paths.size());
  auto done = [&](std::size_t i) { return paths[i].side >= 0; };
  out.pi0 = sample_mean(
      paths.size(), cfg.antithetic, [&](std::size_t i) { return paths[i].side == 0 ? 1.0 : 0.0; },
      done);
  out.mean_fet = sample_mean(
      paths.size(), cfg.antithetic, [&](std::size_t i) { return paths[i].time; }, done);
  flag_censoring(out.pi0, cf);
  flag_censoring(out.mean_fet, cf);
  out.times.mean = out.mean_fet;
  return out;
}

Estimate estimate_lt(const FptSamples& samples, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("estimate_lt: lambda must be >= 0");
  if (samples.times.empty()) throw DomainError("estimate_lt: empty sample set");
  const std::size_t n = samples.times.size();
  Estimate e = sample_mean(
      n, samples.antithetic,
      [&](std::size_t i) {
        const double t = samples.times[i];
        return std::isfinite(t) ? std::exp(-lambda * t) : 0.0;
      },
      [](std::size_t) { return true; });
  e.n_effective = n - samples.censored;
  flag_censoring(e, static_cast<double>(samples.censored) / static_cast<double>(n));
  return e;
}

void write_samples_binary(const std::string& path, const FptSamples& samples) {
  static_assert(std::endian::native == std::endian::little, "binary sample format is little-endian");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os.write(reinterpret_cast<const char*>(samples.times.data()),
           static_cast<std::streamsize>(samples.times.size() * sizeof(double)));
}

void write_samples_csv(const std::string& path, const FptSamples& samples) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os << "path,time,censored\r\n" << std::setprecision(17);
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    const double t = samples.times[i];
    os << i << ',' << (std::isfinite(t) ? t : samples.t_max) << ',' << (std::isfinite(t) ? 0 : 1)
       << "\r\n";
  }
}

}  // namespace resetfpt
