#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sgflow::app {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  /// Known to be unattainable with any real Hodge star; reported as a
  /// failure but does not count against the suite outcome.
  bool expected_failure = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
  /// Every failing check is an expected failure and vice versa.
  bool as_expected() const;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  /// Full-size runs (1000-step closedness, full refinement ladders).
  bool full = true;
};

constexpr int kCriteria = 10;
CriterionResult run_criterion(int id, const SuiteOptions& opt);
std::string format_line(const CriterionResult& r);

}  // namespace sgflow::app
