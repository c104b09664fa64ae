#pragma once

#include <string>
#include <vector>

#include "plankit/config.hpp"

namespace plankit {

struct GradcheckEntry {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  double tolerance = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> checks;
  bool all_pass = false;
};

// Finite-difference verification of every analytic gradient plus the exact
// distance-transform and target-assignment self-checks.
GradcheckReport run_gradcheck(const Config& config, std::uint64_t seed);

std::string gradcheck_report_to_json(const GradcheckReport& report);

}  // namespace plankit
