#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "resetfpt/analytic.hpp"
#include "resetfpt/densities.hpp"

namespace resetfpt {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

/// Command-line values that replace the scenario's simulation settings.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
};

/// Parses a file; ConfigError on unreadable input or malformed JSON.
json load_json_file(const std::string& path);

/// Structural check of a scenario document: required fields, types, and no
/// unknown fields. ConfigError naming the offending location.
void validate_scenario(const json& doc);

/// Validates and runs a forward, inverse or simulate scenario. The result
/// always carries a "rows" array, the table written in CSV format.
json run_scenario(const json& doc, const RunOverrides& overrides = {});

/// {"family": kind, parameter: value, ...}; discrete_uniform uses "points".
DensityFamily family_from_json(const json& j);
json family_to_json(const DensityFamily& f);
DiffusionModel model_from_json(const json& j);

/// JSON text with every floating-point number at 17 significant digits;
/// non-finite numbers become null.
std::string dump_json(const json& v, int indent = 2);

/// RFC 4180 table of result["rows"]: header from the keys in first-seen
/// order, CRLF line endings.
std::string rows_to_csv(const json& result);

}  // namespace resetfpt
