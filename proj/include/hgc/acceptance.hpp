#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgc::acceptance {

/// full: the published parameter points (n up to 8192, minutes of runtime).
/// reduced: the same checks with every dimension capped at 512, for `hgc selftest`.
enum class Scale { full, reduced };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs criterion `id` (1..10). Throws std::out_of_range for unknown ids.
CriterionResult run_criterion(int id, Scale scale);

/// Runs all criteria in order, printing one PASS/FAIL line per criterion to
/// `log` as each finishes.
std::vector<CriterionResult> run_all(Scale scale, std::ostream& log);

std::string format_line(const CriterionResult& r);

}  // namespace hgc::acceptance
