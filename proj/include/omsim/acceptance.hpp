#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "omsim/config.hpp"

namespace omsim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_passed = false;
};

// Runs the ten acceptance criteria against the given base configuration
// (normally the paper parameters), printing one PASS/FAIL line per criterion
// as results arrive. Tolerances are fixed here, not configurable.
AcceptanceReport run_acceptance(const Config& base, std::ostream& log);

}  // namespace omsim
