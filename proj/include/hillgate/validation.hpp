#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hillgate {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

struct ValidationOptions {
  bool quick = false;  // reduced sample counts, same tolerances and structure
  int threads = 4;
  std::uint64_t seed = 20260811;
};

// Runs the full consistency suite (finite-chain identities, Langevin Hill
// consistency, boundary-law and reversibility statistics, AMS validation,
// dt-robustness) and reports one result per criterion.
std::vector<CriterionResult> run_acceptance_suite(const ValidationOptions& opts);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace hillgate
