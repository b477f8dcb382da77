#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rkopt/harness/config.hpp"
#include "rkopt/optimizers.hpp"

namespace rkopt::harness {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kRunDiverged = 2, kVerificationFailed = 3 };

struct RunOutput {
  std::string name;
  std::optional<Trace> trace;
  double step_size = 0.0;
  std::string note;   // how the step size was chosen
  std::string error;  // non-empty when the run failed before producing a trace
};

/// Constants a comparison hands to each optimizer.
struct SharedConstants {
  double gd_step;     // gradient descent step
  double nag_L;
  double nag_mu;
  ConditionedProblem dd_problem;
};

/// One optimizer run with the configured policy. Writes the CSV when config.out
/// is set and prints a summary line to log.
RunOutput cmd_run(const ExperimentConfig& config, std::ostream& log);

/// Runs every optimizer on one objective and x0. Direct discretisation steps are
/// chosen by the stability scan; for the logistic objective, L is scanned as
/// 10^z (smallest z stable for both GD and NAG) and mu = gamma.
std::vector<RunOutput> cmd_compare(const ExperimentConfig& config, std::ostream& log);

struct ScanReport {
  std::string optimizer;
  std::vector<ScanVerdict> verdicts;
  std::optional<ScanResult> result;
};

/// Stability scan over the --policy scan range for the first optimizer.
/// gd and dd scan h = 10^z; nag scans L = 10^-z.
ScanReport cmd_scan(const ExperimentConfig& config, std::ostream& log);

struct OrderReport {
  ButcherTableau tableau;
  int certified_order = 0;
  bool claimed_order_holds = false;
};

OrderReport cmd_check_order(const ButcherTableau& tableau, std::ostream& log);

/// Smallest L = 10^z, z in [ceil(log10 mu), z_max], for which both gradient
/// descent with step 1/L and NAG with (L, mu) pass the stability probe.
/// Throws ScanFailure when no such z exists.
double scan_smoothness(const Objective& objective, const Vector& x0, double mu, int z_max,
                       int probe_iters, std::ostream* log = nullptr);

}  // namespace rkopt::harness
