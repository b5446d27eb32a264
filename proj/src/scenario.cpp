#include "resetfpt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "resetfpt/errors.hpp"
#include "resetfpt/expression.hpp"
#include "resetfpt/forward.hpp"
#include "resetfpt/inverse.hpp"
#include "resetfpt/simulate.hpp"

namespace resetfpt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Serialized as null.
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Structural checks

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("scenario " + where + ": " + what);
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void expect_keys(const json& j, const std::string& where, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional) {
  expect_object(j, where);
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) fail(where, std::string("missing required field '") + k + "'");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(where, "unknown field '" + item.key() + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double number_at(const json& obj, const char* key, const std::string& where) {
  return number(obj.at(key), where + "." + key);
}

std::string string_at(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& where, bool nonempty = true) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  if (nonempty && j.empty()) fail(where, "expected a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <class F>
auto one_of(const std::string& value, const std::string& where,
            std::initializer_list<std::pair<const char*, F>> options) {
  std::string names;
  for (const auto& [name, v] : options) {
    if (value == name) return v;
    names += names.empty() ? name : std::string(", ") + name;
  }
  fail(where, "'" + value + "' is not one of " + names);
}

const std::map<FamilyKind, std::vector<std::string>>& family_parameter_names() {
  static const std::map<FamilyKind, std::vector<std::string>> names = {
      {FamilyKind::Beta, {"alpha", "beta"}},
      {FamilyKind::ScaledBeta, {"alpha", "beta", "upper"}},
      {FamilyKind::Uniform, {"lo", "hi"}},
      {FamilyKind::TruncatedExponential, {"theta", "upper"}},
      {FamilyKind::Exponential, {"theta"}},
      {FamilyKind::Gamma, {"a", "theta"}},
      {FamilyKind::Triangular, {}},
      {FamilyKind::Linear, {"a1", "a0"}},
      {FamilyKind::DiscreteUniform, {}},
      {FamilyKind::Binomial, {"n", "p"}},
      {FamilyKind::Geometric, {"p"}},
      {FamilyKind::Poisson, {"nu"}},
      {FamilyKind::PointMass, {"x"}},
  };
  return names;
}

DensityFamily family_at(const json& j, const std::string& where) {
  expect_object(j, where);
  if (!j.contains("family")) fail(where, "missing required field 'family'");
  if (!j.at("family").is_string()) fail(where + ".family", "expected a string");
  FamilyKind kind;
  try {
    kind = family_kind_from_string(j.at("family").get<std::string>());
  } catch (const DomainError& e) {
    fail(where + ".family", e.what());
  }
  if (kind == FamilyKind::DiscreteUniform) {
    expect_keys(j, where, {"family", "points"}, {});
    return DensityFamily::discrete_uniform(numbers(j.at("points"), where + ".points"));
  }
  const auto& names = family_parameter_names().at(kind);
  std::vector<double> values;
  for (const auto& n : names) {
    if (!j.contains(n)) fail(where, "missing parameter '" + n + "' of " + to_string(kind));
    values.push_back(number(j.at(n), where + "." + n));
  }
  if (j.size() != names.size() + 1) {
    for (const auto& item : j.items()) {
      if (item.key() != "family" && std::find(names.begin(), names.end(), item.key()) == names.end()) {
        fail(where, "unknown field '" + item.key() + "'");
      }
    }
  }
  if (kind == FamilyKind::Binomial && values[0] != std::round(values[0])) {
    fail(where + ".n", "binomial n must be an integer");
  }
  return DensityFamily::from_parameters(kind, values);
}

struct Position {
  bool random = false;
  double value = 0.0;
  std::optional<DensityFamily> law;
  PositionLaw as_law() const { return random ? PositionLaw(*law) : PositionLaw(value); }
};

Position position_at(const json& j, const std::string& where) {
  Position p;
  if (j.is_number()) {
    p.value = j.get<double>();
  } else {
    p.random = true;
    p.law = family_at(j, where);
  }
  return p;
}

DiffusionModel model_at(const json& j, const std::string& where) {
  expect_object(j, where);
  if (!j.contains("kind")) fail(where, "missing required field 'kind'");
  const std::string kind = string_at(j, "kind", where);
  if (kind == "brownian_drift") {
    expect_keys(j, where, {"kind"}, {"mu"});
    return DiffusionModel::brownian_drift(j.contains("mu") ? number_at(j, "mu", where) : 0.0);
  }
  if (kind == "ornstein_uhlenbeck") {
    expect_keys(j, where, {"kind", "nu", "sigma"}, {});
    return DiffusionModel::ornstein_uhlenbeck(number_at(j, "nu", where), number_at(j, "sigma", where));
  }
  if (kind == "geometric_bm") {
    expect_keys(j, where, {"kind", "theta", "sigma"}, {});
    return DiffusionModel::geometric_bm(number_at(j, "theta", where), number_at(j, "sigma", where));
  }
  if (kind == "feller") {
    expect_keys(j, where, {"kind"}, {});
    return DiffusionModel::feller();
  }
  if (kind == "wright_fisher") {
    expect_keys(j, where, {"kind"}, {});
    return DiffusionModel::wright_fisher();
  }
  if (kind == "custom") {
    expect_keys(j, where, {"kind", "drift", "sigma"}, {"constants"});
    std::map<std::string, double> constants;
    if (j.contains("constants")) {
      expect_object(j.at("constants"), where + ".constants");
      for (const auto& item : j.at("constants").items()) {
        constants[item.key()] = number(item.value(), where + ".constants." + item.key());
      }
    }
    const std::string drift = string_at(j, "drift", where);
    const std::string sigma = string_at(j, "sigma", where);
    auto mu = std::make_shared<Expression>(drift, constants);
    auto sg = std::make_shared<Expression>(sigma, constants);
    return DiffusionModel::custom([mu](double x) { return (*mu)(x); },
                                  [sg](double x) { return (*sg)(x); },
                                  "mu(x) = " + drift + ", sigma(x) = " + sigma);
  }
  if (kind == "tabulated") {
    expect_keys(j, where, {"kind", "x", "drift", "sigma"}, {});
    return DiffusionModel::tabulated(numbers(j.at("x"), where + ".x"), numbers(j.at("drift"), where + ".drift"),
                                     numbers(j.at("sigma"), where + ".sigma"));
  }
  fail(where + ".kind", "unknown model kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Common scenario fields

struct Common {
  std::string name;
  std::string type;
  DiffusionModel model = DiffusionModel::brownian_drift(0.0);
  bool has_interval = false;
  double lo = 0.0;
  double hi = kInf;
  double rate = 0.0;
  Position reset;
  Position start;
};

Common common_at(const json& doc) {
  Common c;
  c.name = doc.at("name").get<std::string>();
  c.type = doc.at("type").get<std::string>();
  if (doc.contains("model")) c.model = model_at(doc.at("model"), "model");
  if (doc.contains("interval")) {
    const json& iv = doc.at("interval");
    expect_keys(iv, "interval", {"lo", "hi"}, {});
    c.has_interval = true;
    c.lo = number_at(iv, "lo", "interval");
    c.hi = number_at(iv, "hi", "interval");
    if (!(c.lo < c.hi)) fail("interval", "lo must be < hi");
  }
  if (doc.contains("reset")) {
    const json& r = doc.at("reset");
    expect_keys(r, "reset", {"rate"}, {"position"});
    c.rate = number_at(r, "rate", "reset");
    if (r.contains("position")) c.reset = position_at(r.at("position"), "reset.position");
  }
  if (doc.contains("start")) c.start = position_at(doc.at("start"), "start");
  return c;
}

bool is_bm(const Common& c) { return c.model.kind() == ModelKind::BrownianDrift; }

void require_bm(const Common& c, const std::string& what) {
  if (!is_bm(c)) fail("model", what + " is available for brownian_drift only");
  if (c.lo != 0.0) fail("interval", what + " for brownian_drift needs lo = 0");
}

json estimate_json(const Estimate& e) {
  json j = {{"value", e.value}, {"std_error", e.std_error}, {"method", to_string(e.method)}};
  if (e.method == EstimateMethod::MonteCarlo) {
    j["n_effective"] = e.n_effective;
    j["censored_fraction"] = e.censored_fraction;
  }
  if (!e.warning.empty()) j["warning"] = e.warning;
  return j;
}

const char* route_used(const Estimate& e) {
  return e.method == EstimateMethod::Analytic ? "closed-form" : "quadrature";
}

// ---------------------------------------------------------------------------
// Forward

void validate_forward(const json& doc) {
  expect_keys(doc, "(root)",
              {"schema_version", "name", "type", "target", "reset"},
              {"model", "interval", "start", "lambda", "route", "sweep", "output", "description"});
  one_of<int>(string_at(doc, "target", "(root)"), "target",
              {{"q", 0}, {"mean_fet", 0}, {"mean_fpt", 0}, {"fpt_lt", 0}});
  if (doc.contains("lambda")) numbers(doc.at("lambda"), "lambda");
  if (doc.contains("route")) {
    if (!doc.at("route").is_string()) fail("route", "expected a string");
    route_from_string(doc.at("route").get<std::string>());
  }
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    expect_keys(s, "sweep", {"parameter", "values"}, {});
    one_of<int>(string_at(s, "parameter", "sweep"), "sweep.parameter",
                {{"x_reset", 0}, {"x", 0}, {"r", 0}, {"mu", 0}, {"b", 0}});
    numbers(s.at("values"), "sweep.values");
  }
}

json run_forward(const json& doc) {
  Common c = common_at(doc);
  const std::string target = doc.at("target").get<std::string>();
  const Route route = doc.contains("route") ? route_from_string(doc.at("route").get<std::string>()) : Route::Auto;
  if (c.start.random && c.reset.random) fail("start", "only one of start and reset.position may be random");
  const bool case2 = c.reset.random;
  std::string sweep_name;
  std::vector<double> sweep_values{std::numeric_limits<double>::quiet_NaN()};
  if (doc.contains("sweep")) {
    sweep_name = doc.at("sweep").at("parameter").get<std::string>();
    sweep_values = numbers(doc.at("sweep").at("values"), "sweep.values");
  }
  std::vector<double> lambdas{0.0};
  if (target == "fpt_lt") {
    if (!doc.contains("lambda")) fail("(root)", "target fpt_lt needs 'lambda'");
    lambdas = numbers(doc.at("lambda"), "lambda");
  }

  json rows = json::array();
  for (double sv : sweep_values) {
    double mu = is_bm(c) ? c.model.param(0) : 0.0;
    double r = c.rate;
    double x_reset = c.reset.value;
    double x = c.start.value;
    double b = c.hi;
    if (sweep_name == "x_reset") x_reset = sv;
    if (sweep_name == "x") x = sv;
    if (sweep_name == "r") r = sv;
    if (sweep_name == "mu") mu = sv;
    if (sweep_name == "b") b = sv;
    if (sweep_name == "mu" && !is_bm(c)) fail("sweep.parameter", "mu sweeps need a brownian_drift model");
    const DensityFamily g = c.start.random ? *c.start.law : DensityFamily::point_mass(x);
    const DiffusionModel model = is_bm(c) ? DiffusionModel::brownian_drift(mu) : c.model;
    for (double lambda : lambdas) {
      Estimate e;
      if (target == "q" || target == "mean_fet") {
        if (!c.has_interval && sweep_name != "b") fail("interval", "target " + target + " needs an interval");
        if (case2) {
          require_bm(c, "random reset position");
          e = target == "q" ? q_case2(*c.reset.law, x, mu, r, b) : mean_fet_case2(*c.reset.law, x, mu, r, b);
        } else if (is_bm(c) && c.lo == 0.0) {
          e = target == "q" ? q_case1(g, mu, r, x_reset, b, route)
                            : mean_fet_case1(g, mu, r, x_reset, b, route);
        } else if (target == "q") {
          e = q_case1_general(g, model, r, x_reset, c.lo, b);
        } else {
          const BvpSolution sol = bvp_solve(model, c.lo, b, r, x_reset, BvpTarget::MeanExitTime);
          const QuadResult qr = mixture_integral(g, [&](double y) { return sol(y); }, QuadOptions{1e-9, 1e-14, 40, 4000, false});
          e.value = qr.value;
          e.std_error = qr.abs_error + sol.refinement_change;
          e.method = EstimateMethod::Quadrature;
        }
      } else if (target == "mean_fpt") {
        require_bm(c, "mean_fpt");
        e = case2 ? mean_fpt_case2(*c.reset.law, x, mu, r, route) : mean_fpt_case1(g, mu, r, x_reset, route);
      } else if (target == "fpt_lt") {
        require_bm(c, "fpt_lt");
        e = case2 ? fpt_lt_case2(lambda, *c.reset.law, x, mu, r) : fpt_lt_case1(lambda, g, mu, r, x_reset, route);
      } else {
        fail("target", "'" + target + "' is not one of q, mean_fet, mean_fpt, fpt_lt");
      }
      json row;
      if (!sweep_name.empty()) row[sweep_name] = sv;
      if (target == "fpt_lt") row["lambda"] = lambda;
      row["value"] = e.value;
      row["error"] = e.std_error;
      row["route"] = route_used(e);
      rows.push_back(row);
    }
  }
  return {{"name", c.name}, {"type", "forward"}, {"target", target},
          {"case", case2 ? "random_reset" : "random_initial"}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Inverse

void validate_inverse(const json& doc) {
  expect_keys(doc, "(root)", {"schema_version", "name", "type", "case", "problem", "search", "reset"},
              {"model", "interval", "start", "options", "output", "description"});
  one_of<int>(string_at(doc, "case", "(root)"), "case", {{"random_initial", 0}, {"random_reset", 0}});
  const json& p = doc.at("problem");
  expect_object(p, "problem");
  if (!p.contains("kind")) fail("problem", "missing required field 'kind'");
  const std::string kind = string_at(p, "kind", "problem");
  if (kind == "ifpp") {
    expect_keys(p, "problem", {"kind", "q"}, {});
    number_at(p, "q", "problem");
  } else if (kind == "imfpt" || kind == "imfet") {
    expect_keys(p, "problem", {"kind", "m"}, {});
    number_at(p, "m", "problem");
  } else if (kind == "ifpt") {
    expect_keys(p, "problem", {"kind", "target"}, {});
    const json& t = p.at("target");
    expect_object(t, "problem.target");
    if (t.contains("transform")) {
      expect_keys(t, "problem.target", {"transform"}, {"constants"});
    } else if (t.contains("samples")) {
      expect_keys(t, "problem.target", {"samples"}, {});
      numbers(t.at("samples"), "problem.target.samples");
    } else if (t.contains("moments")) {
      expect_keys(t, "problem.target", {"moments"}, {});
      numbers(t.at("moments"), "problem.target.moments");
    } else {
      fail("problem.target", "expected one of 'transform', 'samples', 'moments'");
    }
  } else {
    fail("problem.kind", "'" + kind + "' is not one of ifpp, ifpt, imfpt, imfet");
  }
  const json& s = doc.at("search");
  expect_object(s, "search");
  if (s.contains("candidates")) {
    expect_keys(s, "search", {"candidates"}, {});
    if (!s.at("candidates").is_array() || s.at("candidates").empty()) {
      fail("search.candidates", "expected a nonempty array of families");
    }
  } else {
    expect_keys(s, "search", {"family", "free", "lo", "hi"}, {"ties"});
    if (!s.at("free").is_array()) fail("search.free", "expected an array of parameter names");
    numbers(s.at("lo"), "search.lo");
    numbers(s.at("hi"), "search.hi");
  }
  if (doc.contains("options")) {
    const json& o = doc.at("options");
    expect_keys(o, "options", {}, {"restarts", "seed", "range_grid"});
  }
}

SearchSpace search_at(const json& s) {
  if (s.contains("candidates")) {
    std::vector<DensityFamily> list;
    for (std::size_t i = 0; i < s.at("candidates").size(); ++i) {
      list.push_back(family_at(s.at("candidates")[i], "search.candidates[" + std::to_string(i) + "]"));
    }
    return SearchSpace::candidates(std::move(list));
  }
  std::vector<std::string> free;
  for (const auto& f : s.at("free")) {
    if (!f.is_string()) fail("search.free", "expected parameter names");
    free.push_back(f.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> ties;
  if (s.contains("ties")) {
    expect_object(s.at("ties"), "search.ties");
    for (const auto& item : s.at("ties").items()) {
      if (!item.value().is_string()) fail("search.ties." + item.key(), "expected a parameter name");
      ties.emplace_back(item.key(), item.value().get<std::string>());
    }
  }
  return SearchSpace::parametric(family_at(s.at("family"), "search.family"), free,
                                 Box{numbers(s.at("lo"), "search.lo"), numbers(s.at("hi"), "search.hi")}, ties);
}

json run_inverse(const json& doc) {
  Common c = common_at(doc);
  InverseSetting st;
  st.which = doc.at("case") == "random_initial" ? InverseCase::RandomInitial : InverseCase::RandomReset;
  st.r = c.rate;
  st.lo = c.lo;
  st.b = c.has_interval ? c.hi : 1.0;
  if (st.which == InverseCase::RandomInitial) {
    if (c.reset.random) fail("reset.position", "random_initial needs a fixed reset position");
    st.x_reset = c.reset.value;
  } else {
    if (c.start.random || !doc.contains("start")) fail("start", "random_reset needs a fixed start");
    st.x = c.start.value;
  }
  const json& p = doc.at("problem");
  const InverseKind kind = inverse_kind_from_string(p.at("kind").get<std::string>());
  if (is_bm(c)) {
    st.mu = c.model.param(0);
    if (c.lo != 0.0) fail("interval", "brownian_drift problems need lo = 0");
  } else if (kind == InverseKind::IFPP && st.which == InverseCase::RandomInitial) {
    if (auto map = c.model.conjugation()) {
      st.conjugation = *map;
    } else {
      st.model = c.model;
    }
  } else {
    fail("model", "only ifpp with random_initial supports models other than brownian_drift");
  }
  InverseOptions opts;
  if (doc.contains("options")) {
    const json& o = doc.at("options");
    if (o.contains("restarts")) opts.optim.restarts = static_cast<int>(number_at(o, "restarts", "options"));
    if (o.contains("seed")) opts.optim.seed = static_cast<std::uint64_t>(number_at(o, "seed", "options"));
    if (o.contains("range_grid")) opts.range_grid = static_cast<int>(number_at(o, "range_grid", "options"));
  }
  const SearchSpace space = search_at(doc.at("search"));
  InverseSolution sol;
  switch (kind) {
    case InverseKind::IFPP: sol = solve_ifpp(number_at(p, "q", "problem"), st, space, opts); break;
    case InverseKind::IMFPT: sol = solve_imfpt(number_at(p, "m", "problem"), st, space, opts); break;
    case InverseKind::IMFET: sol = solve_imfet(number_at(p, "m", "problem"), st, space, opts); break;
    case InverseKind::IFPT: {
      const json& t = p.at("target");
      FptLawSpec target;
      if (t.contains("transform")) {
        std::map<std::string, double> constants;
        if (t.contains("constants")) {
          for (const auto& item : t.at("constants").items()) {
            constants[item.key()] = number(item.value(), "problem.target.constants." + item.key());
          }
        }
        auto e = std::make_shared<Expression>(string_at(t, "transform", "problem.target"), constants);
        target = FptLawSpec::from_transform([e](double l) { return (*e)(l); });
      } else if (t.contains("samples")) {
        target = FptLawSpec::from_samples(numbers(t.at("samples"), "problem.target.samples"));
      } else {
        target = FptLawSpec::from_moments(numbers(t.at("moments"), "problem.target.moments"));
      }
      sol = solve_ifpt(target, st, space, opts);
      break;
    }
  }
  json fitted = json::object();
  for (const auto& [n, v] : sol.fitted) fitted[n] = v;
  json diag = {{"iterations", sol.iterations},
               {"converged", sol.converged},
               {"locally_unique", sol.locally_unique},
               {"certificate", nullptr}};
  if (sol.certificate) {
    diag["certificate"] = {{"range_lo", sol.certificate->lo},
                           {"range_hi", sol.certificate->hi},
                           {"monotone", sol.certificate->monotone},
                           {"evaluations", sol.certificate->evaluations}};
  }
  if (!sol.warning.empty()) diag["warning"] = sol.warning;
  json out = {{"name", c.name},
              {"type", "inverse"},
              {"problem", to_string(kind)},
              {"case", doc.at("case")},
              {"status", to_string(sol.status)},
              {"objective", to_string(sol.objective)},
              {"residual", sol.residual},
              {"family", family_to_json(sol.family)},
              {"fitted", fitted},
              {"diagnostics", diag}};
  json row = {{"status", to_string(sol.status)}, {"residual", sol.residual}};
  for (const auto& [n, v] : sol.fitted) row[n] = v;
  if (kind != InverseKind::IFPT) {
    out["replay"] = {{"target", sol.target}, {"value", sol.replay}};
    row["target"] = sol.target;
    row["replay"] = sol.replay;
  }
  out["rows"] = json::array({row});
  return out;
}

// ---------------------------------------------------------------------------
// Simulate

void validate_simulate(const json& doc) {
  expect_keys(doc, "(root)", {"schema_version", "name", "type", "start", "reset", "simulation"},
              {"model", "interval", "output", "description"});
  const json& s = doc.at("simulation");
  expect_keys(s, "simulation", {"estimate"},
              {"barrier", "n_paths", "dt", "t_max", "seed", "antithetic", "bridge", "lambda", "samples"});
  one_of<int>(string_at(s, "estimate", "simulation"), "simulation.estimate", {{"exit", 0}, {"fpt", 0}});
  for (const char* k : {"barrier", "n_paths", "dt", "t_max", "seed"}) {
    if (s.contains(k)) number_at(s, k, "simulation");
  }
  for (const char* k : {"antithetic", "bridge"}) {
    if (s.contains(k) && !s.at(k).is_boolean()) fail(std::string("simulation.") + k, "expected a boolean");
  }
  if (s.contains("lambda")) numbers(s.at("lambda"), "simulation.lambda");
  if (s.contains("samples")) {
    const json& o = s.at("samples");
    expect_keys(o, "simulation.samples", {"path"}, {"format"});
    if (o.contains("format")) {
      one_of<int>(string_at(o, "format", "simulation.samples"), "simulation.samples.format",
                  {{"binary", 0}, {"csv", 0}});
    }
  }
}

json run_simulate(const json& doc, const RunOverrides& ov) {
  Common c = common_at(doc);
  const json& s = doc.at("simulation");
  SimConfig cfg;
  if (s.contains("n_paths")) {
    const double n = number_at(s, "n_paths", "simulation");
    if (!(n >= 1.0) || n != std::round(n)) fail("simulation.n_paths", "expected a positive integer");
    cfg.n_paths = static_cast<std::size_t>(n);
  }
  if (s.contains("dt")) cfg.dt = number_at(s, "dt", "simulation");
  if (s.contains("t_max")) cfg.t_max = number_at(s, "t_max", "simulation");
  if (s.contains("seed")) {
    if (!s.at("seed").is_number_unsigned()) fail("simulation.seed", "expected a nonnegative integer");
    cfg.seed = s.at("seed").get<std::uint64_t>();
  }
  if (s.contains("antithetic")) cfg.antithetic = s.at("antithetic").get<bool>();
  if (s.contains("bridge")) cfg.bridge = s.at("bridge").get<bool>();
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.paths) cfg.n_paths = *ov.paths;
  if (ov.dt) cfg.dt = *ov.dt;
  const ResetSpec reset{c.rate, c.reset.as_law()};
  const std::string estimate = s.at("estimate").get<std::string>();
  json out = {{"name", c.name}, {"type", "simulate"}, {"estimate", estimate},
              {"config", {{"n_paths", cfg.n_paths}, {"dt", cfg.dt}, {"seed", cfg.seed},
                          {"antithetic", cfg.antithetic}, {"bridge", cfg.bridge}}}};
  json rows = json::array();
  auto add_row = [&](const std::string& quantity, const Estimate& e, double lambda) {
    json row = {{"quantity", quantity}};
    row["lambda"] = lambda;
    row["value"] = e.value;
    row["std_error"] = e.std_error;
    row["n_effective"] = e.n_effective;
    row["censored_fraction"] = e.censored_fraction;
    rows.push_back(row);
  };
  const FptSamples* samples = nullptr;
  ExitResult exit;
  FptSamples fpt;
  std::string warning;
  if (estimate == "exit") {
    if (!c.has_interval) fail("interval", "exit estimates need an interval");
    exit = simulate_exit(c.model, c.start.as_law(), reset, c.lo, c.hi, cfg);
    out["pi0"] = estimate_json(exit.pi0);
    out["mean_fet"] = estimate_json(exit.mean_fet);
    add_row("pi0", exit.pi0, kNaN);
    add_row("mean_fet", exit.mean_fet, kNaN);
    samples = &exit.times;
    warning = exit.mean_fet.warning;
  } else {
    const double barrier = s.contains("barrier") ? number_at(s, "barrier", "simulation") : c.lo;
    fpt = simulate_fpt(c.model, c.start.as_law(), reset, barrier, cfg);
    out["mean_fpt"] = estimate_json(fpt.mean);
    add_row("mean_fpt", fpt.mean, kNaN);
    samples = &fpt;
    warning = fpt.mean.warning;
  }
  out["config"]["t_max"] = samples->t_max;
  out["censored"] = samples->censored;
  if (s.contains("lambda")) {
    json lt = json::array();
    for (double l : numbers(s.at("lambda"), "simulation.lambda")) {
      const Estimate e = estimate_lt(*samples, l);
      lt.push_back({{"lambda", l}, {"value", e.value}, {"std_error", e.std_error}});
      add_row("fpt_lt", e, l);
    }
    out["fpt_lt"] = lt;
  }
  if (s.contains("samples")) {
    const json& o = s.at("samples");
    const std::string path = o.at("path").get<std::string>();
    const std::string format = o.contains("format") ? o.at("format").get<std::string>() : "binary";
    if (format == "csv") {
      write_samples_csv(path, *samples);
    } else {
      write_samples_binary(path, *samples);
    }
  }
  out["warning"] = warning.empty() ? json(nullptr) : json(warning);
  out["rows"] = rows;
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_to(std::ostringstream& os, const json& v, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (const auto& item : v.items()) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << json(item.key()).dump() << sep;
        dump_to(os, item.value(), indent, depth + 1);
      }
      os << nl << close << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << "[" << nl;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) os << "," << nl;
        os << pad;
        dump_to(os, v[i], indent, depth + 1);
      }
      os << nl << close << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_number(v.get<double>());
      return;
    default:
      os << v.dump();
  }
}

std::string csv_field(const json& v) {
  std::string s;
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>()) == "null" ? "" : format_number(v.get<double>());
  if (v.is_string()) {
    s = v.get<std::string>();
  } else {
    s = v.dump();
  }
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void validate_scenario(const json& doc) {
  expect_object(doc, "(root)");
  for (const char* k : {"schema_version", "name", "type"}) {
    if (!doc.contains(k)) fail("(root)", std::string("missing required field '") + k + "'");
  }
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kSchemaVersion) {
    fail("schema_version", "expected " + std::to_string(kSchemaVersion));
  }
  if (!doc.at("name").is_string()) fail("name", "expected a string");
  if (doc.contains("description") && !doc.at("description").is_string()) fail("description", "expected a string");
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    expect_keys(o, "output", {}, {"path", "format"});
    if (o.contains("path")) string_at(o, "path", "output");
    if (o.contains("format")) one_of<int>(string_at(o, "format", "output"), "output.format", {{"json", 0}, {"csv", 0}});
  }
  const std::string type = string_at(doc, "type", "(root)");
  if (type == "forward") {
    validate_forward(doc);
  } else if (type == "inverse") {
    validate_inverse(doc);
  } else if (type == "simulate") {
    validate_simulate(doc);
  } else {
    fail("type", "'" + type + "' is not one of forward, inverse, simulate");
  }
  // Fields that need semantic parsing are checked by building them.
  common_at(doc);
}

json run_scenario(const json& doc, const RunOverrides& overrides) {
  validate_scenario(doc);
  const std::string type = doc.at("type").get<std::string>();
  if (type == "forward") return run_forward(doc);
  if (type == "inverse") return run_inverse(doc);
  return run_simulate(doc, overrides);
}

DensityFamily family_from_json(const json& j) { return family_at(j, "family"); }

json family_to_json(const DensityFamily& f) {
  json j = {{"family", to_string(f.kind())}};
  if (f.kind() == FamilyKind::DiscreteUniform) {
    j["points"] = f.points();
    return j;
  }
  for (const auto& [n, v] : f.parameters()) {
    if (f.kind() == FamilyKind::Binomial && n == "n") {
      j[n] = static_cast<int>(v);
    } else {
      j[n] = v;
    }
  }
  return j;
}

DiffusionModel model_from_json(const json& j) { return model_at(j, "model"); }

std::string dump_json(const json& v, int indent) {
  std::ostringstream os;
  dump_to(os, v, indent, 0);
  return os.str();
}

std::string rows_to_csv(const json& result) {
  if (!result.contains("rows") || !result.at("rows").is_array()) throw DomainError("rows_to_csv: no rows");
  std::vector<std::string> header;
  for (const auto& row : result.at("rows")) {
    for (const auto& item : row.items()) {
      if (std::find(header.begin(), header.end(), item.key()) == header.end()) header.push_back(item.key());
    }
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(json(header[i]));
  os << "\r\n";
  for (const auto& row : result.at("rows")) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      os << (i ? "," : "");
      if (row.contains(header[i])) os << csv_field(row.at(header[i]));
    }
    os << "\r\n";
  }
  return os.str();
}

}  // namespace resetfpt
