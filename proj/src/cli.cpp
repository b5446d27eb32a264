#include "resetfpt/cli.hpp"

#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "resetfpt/errors.hpp"
#include "resetfpt/scenario.hpp"
#include "resetfpt/verify.hpp"

namespace resetfpt {
namespace {

struct Flags {
  std::string scenario;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  bool strict = false;
  std::string filter;
};

void add_common(CLI::App* cmd, Flags& f, bool needs_scenario) {
  auto* s = cmd->add_option("--scenario", f.scenario, "Scenario file (JSON)");
  if (needs_scenario) s->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output file (default: the scenario's output.path, else stdout)");
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void write_error(std::ostream& err, const std::string& category, const std::string& message,
                 const RangeError* range = nullptr) {
  json e = {{"error", {{"category", category}, {"message", message}}}};
  if (range) e["error"]["attainable"] = {range->attainable_lo(), range->attainable_hi()};
  err << dump_json(e, -1) << "\n";
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

int run_scenario_command(const std::string& type, const Flags& f, std::ostream& out) {
  const json doc = load_json_file(f.scenario);
  validate_scenario(doc);
  if (doc.at("type") != type) {
    throw ConfigError("scenario type is '" + doc.at("type").get<std::string>() + "', command is '" + type + "'");
  }
  const RunOverrides ov{f.seed, f.paths, f.dt};
  const json result = run_scenario(doc, ov);
  std::string format = f.format;
  std::string path = f.out;
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (format.empty() && o.contains("format")) format = o.at("format").get<std::string>();
    if (path.empty() && o.contains("path")) path = o.at("path").get<std::string>();
  }
  emit(format == "csv" ? rows_to_csv(result) : dump_json(result) + "\n", path, out);
  if (f.strict && result.contains("warning") && !result.at("warning").is_null()) return kExitStrictCensoring;
  return kExitOk;
}

int run_verify_command(const Flags& f, std::ostream& out) {
  const auto cases = run_verify(f.filter);
  if (cases.empty()) throw ConfigError("no verify case matches '" + f.filter + "'");
  bool ok = true;
  for (const auto& c : cases) ok = ok && c.pass();
  if (f.format == "json" || f.format == "csv") {
    json rows = json::array();
    json list = json::array();
    for (const auto& c : cases) {
      json checks = json::array();
      for (const auto& k : c.checks) {
        json row = {{"case", c.id},          {"check", k.label},         {"expected", k.expected},
                    {"computed", k.computed}, {"tolerance", k.tolerance}, {"relative", k.relative},
                    {"pass", k.pass}};
        rows.push_back(row);
        checks.push_back(row);
      }
      list.push_back({{"id", c.id},
                      {"title", c.title},
                      {"pass", c.pass()},
                      {"seconds", c.seconds},
                      {"error", c.error.empty() ? json(nullptr) : json(c.error)},
                      {"checks", checks}});
    }
    const json report = {{"pass", ok}, {"cases", list}, {"rows", rows}};
    emit(f.format == "csv" ? rows_to_csv(report) : dump_json(report) + "\n", f.out, out);
  } else {
    emit(verify_report(cases), f.out, out);
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"First-passage functionals of diffusions with Poissonian resetting", "resetfpt"};
  app.require_subcommand(1);
  Flags f;
  auto* fwd = app.add_subcommand("forward", "Evaluate a forward scenario");
  auto* inv = app.add_subcommand("inverse", "Solve an inverse scenario");
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  auto* ver = app.add_subcommand("verify", "Replay the regression cases");
  add_common(fwd, f, true);
  add_common(inv, f, true);
  add_common(sim, f, true);
  sim->add_option("--seed", f.seed, "Base seed of the random streams");
  sim->add_option("--paths", f.paths, "Number of paths")->check(CLI::PositiveNumber);
  sim->add_option("--dt", f.dt, "Time step")->check(CLI::PositiveNumber);
  sim->add_flag("--strict", f.strict, "Exit 4 when the censoring warning is raised");
  ver->add_option("filter", f.filter, "Case id prefix, e.g. ex2.1");
  ver->add_option("--out", f.out, "Output file (default: stdout)");
  ver->add_option("--format", f.format, "Report format (default: table)")->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // help requests
    write_error(err, "config", e.what());
    return kExitDomain;
  }

  try {
    if (ver->parsed()) return run_verify_command(f, out);
    if (fwd->parsed()) return run_scenario_command("forward", f, out);
    if (inv->parsed()) return run_scenario_command("inverse", f, out);
    return run_scenario_command("simulate", f, out);
  } catch (const RangeError& e) {
    write_error(err, e.category(), e.what(), &e);
    return kExitDomain;
  } catch (const DomainError& e) {
    write_error(err, e.category(), e.what());
    return kExitDomain;
  } catch (const SolverError& e) {
    write_error(err, e.category(), e.what());
    return kExitSolver;
  } catch (const json::exception& e) {
    write_error(err, "config", e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    write_error(err, "solver", e.what());
    return kExitSolver;
  }
}

}  // namespace resetfpt
