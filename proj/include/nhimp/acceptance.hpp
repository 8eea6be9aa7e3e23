#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nhimp {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the acceptance criteria (all of them when `only` is empty) and writes
/// one "PASS"/"FAIL" line per criterion to `log` as each finishes.
std::vector<CriterionResult> run_acceptance(std::ostream& log, const std::vector<int>& only = {});

inline constexpr int kCriterionCount = 11;

}  // namespace nhimp
