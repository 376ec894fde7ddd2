#pragma once

#include <ostream>
#include <string>

#include "sde_cli/scenario.hpp"

namespace sde::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNoConvergence = 3,
  kVerificationFailed = 4,
};

struct SweepSpec {
  /// lambda_m, lambda_b, a_bar or sigma.
  std::string param;
  double lo = 0.0;
  double hi = 0.0;
  int steps = 2;

  /// Throws ConfigError unless lo < hi, steps >= 2 and param is known.
  void validate() const;
};

/// Writes bank_menu.csv, market.csv, equilibrium.csv and summary.txt into the
/// configured output directory.
int run_solve(const ScenarioConfig& cfg, std::ostream& log);
/// Writes sweep.csv; rows whose solve failed carry a non-ok status.
int run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep, std::ostream& log);
/// Runs the oracle checks and prints one PASS/FAIL line per check.
int run_verify(const ScenarioConfig& cfg, std::ostream& report);

/// Worker count for sweeps: SDE_THREADS if set and positive, else the hardware count.
unsigned thread_cap();

}  // namespace sde::cli
