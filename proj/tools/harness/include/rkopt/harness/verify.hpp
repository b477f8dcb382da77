#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rkopt::harness {

struct CheckResult {
  std::string suite;
  std::string name;
  std::string property;  // the inequality or identity being checked
  bool passed = false;
  double margin = 0.0;   // smallest observed slack (positive when the check holds)
  std::string detail;
};

/// Suites: order, lyapunov, lemmas, assumptions, all. Throws ConfigError otherwise.
std::vector<CheckResult> run_verify_suite(std::string_view suite);

/// Prints one line per check; returns true when all passed.
bool print_verify_report(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace rkopt::harness
