#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pathrep_cli/report.hpp"

namespace pathrep::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  /// Set when the criterion aborted with an exception.
  std::string error;
  double seconds = 0;

  bool pass() const;
};

constexpr int kCriteria = 8;

const char* criterion_title(int id);

/// Runs criterion `id` (1..8) with randomized inputs drawn from `seed`.
CriterionResult run_criterion(int id, std::uint64_t seed,
                              const std::map<std::string, double>& overrides = {});

/// Every criterion in order. Overrides apply across criteria; unknown keys
/// throw std::invalid_argument before anything runs.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::map<std::string, double>& overrides = {});

/// Names of all checks with their default thresholds (for validation and docs).
std::vector<Check> acceptance_catalog();

/// Builds a report (and a per-check table) from criterion results.
Report acceptance_report(const std::vector<CriterionResult>& results, std::uint64_t seed);

}  // namespace pathrep::cli
