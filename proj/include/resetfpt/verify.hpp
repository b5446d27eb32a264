#pragma once

#include <string>
#include <vector>

namespace resetfpt {

/// One compared quantity. Relative checks divide the difference by |expected|.
struct VerifyCheck {
  std::string label;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  bool pass = false;
};

struct VerifyCase {
  std::string id;
  std::string title;
  std::vector<VerifyCheck> checks;
  // Set when the case threw; the case then fails.
  std::string error;
  double seconds = 0.0;
  bool pass() const;
};

/// Ids of all regression cases, sorted.
std::vector<std::string> verify_case_ids();

/// Runs the cases whose id starts with `filter` (all when empty), sorted by id.
std::vector<VerifyCase> run_verify(const std::string& filter = "");

/// Fixed-width table: case id, check, expected, computed, tolerance, result.
std::string verify_report(const std::vector<VerifyCase>& cases);

}  // namespace resetfpt
