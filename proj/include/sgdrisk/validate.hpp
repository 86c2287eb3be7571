#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgdrisk/config.hpp"

namespace sgdrisk {

/// One line of the verdict log.
struct Verdict {
  std::string check;
  std::string params_digest;
  bool holds = false;
  double max_violation = 0.0;
  std::uint64_t seed = 0;
  bool hard = true;          // diagnostics never fail the run
  std::string info;          // optional pre-serialized JSON object
};

std::string verdict_to_json_line(const Verdict& v);

struct ValidateOptions {
  bool inject_coeff_bug = false;  // negative-control hook: perturbs the
                                  // vector recursion so the matrix
                                  // cross-check must fail
  int jobs = 1;
  int oracle_d_cap = 64;          // full-matrix checks skip larger d
};

struct ValidateResult {
  std::vector<Verdict> verdicts;
  bool all_hard_passed = true;
};

/// Runs the invariant suite (diagonal equivalence, operator dominance,
/// resolvent bound, fourth-moment identity, Monte Carlo consistency,
/// iterate-bound domination, plus the report-only lower-bound diagnostic)
/// over the config's grid.
ValidateResult run_validation(const ExperimentConfig& config,
                              const ValidateOptions& options);

std::string params_digest(const ProblemSpec& spec, TailWindow window);

}  // namespace sgdrisk
