#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rkopt/dynamics.hpp"
#include "rkopt/errors.hpp"
#include "rkopt/objectives.hpp"
#include "rkopt/tableau.hpp"

namespace rkopt {

enum class Outcome { converged, budget_exhausted, diverged };

std::string to_string(Outcome outcome);

struct TraceRecord {
  std::int64_t iteration = 0;
  std::int64_t grad_evals = 0;
  double f_gap = 0.0;
  std::optional<double> lyapunov;
  double step_size = 0.0;
};

/// Per-iteration convergence record of one optimizer run. The first record is
/// the starting point (iteration 0, no gradients spent).
struct Trace {
  std::vector<TraceRecord> records;
  Outcome outcome = Outcome::budget_exhausted;

  const TraceRecord& initial() const { return records.front(); }
  const TraceRecord& final() const { return records.back(); }
  /// Gradient evaluations at the first record with f_gap <= target, if any.
  std::optional<std::int64_t> evals_to_reach(double target) const;
};

/// Stopping rule shared by all optimizers: stop once f_gap <= target, or before
/// an iteration would push grad_evals past budget.
struct RunLimits {
  std::int64_t budget = 0;
  double target = 0.0;
  // Keep every record_stride-th iterate; the first and last are always kept.
  std::int64_t record_stride = 1;
};

struct FixedStep {
  double h;
};
/// Step from theoretical_step_size with the given constant c.
struct TheoremStep {
  double c;
};
/// h = 10^z with z the largest stable exponent in [z_min, z_max].
struct ScanStep {
  int z_min;
  int z_max;
  int probe_iters = 100;
};
using StepPolicy = std::variant<FixedStep, TheoremStep, ScanStep>;

/// Exponent (s + 3) / (2 (s + 1)) of the theoretical step size.
double theorem_exponent(int s);

/// min(E0^-g, Q^-g) / (2 c^(1/(s+1))) with g = theorem_exponent(s).
double theoretical_step_size(double E0, double Q, int s, double c);

/// Runge-Kutta discretisation of the rescaled heavy-ball system from y0 = [0; x0].
/// Each iteration costs tableau.stages() gradients. Records carry the Lyapunov
/// value; the objective must know its optimum.
Trace direct_discretization(const ConditionedProblem& problem, const Vector& x0,
                            const ButcherTableau& tableau, const StepPolicy& policy,
                            const RunLimits& limits);

/// x_{k+1} = x_k - h grad f(x_k).
Trace gradient_descent(const Objective& objective, const Vector& x0, double h, const RunLimits& limits);

/// Constant-momentum Nesterov with step 1/L and beta = (sqrt Q - 1) / (sqrt Q + 1).
Trace nag(const Objective& objective, const Vector& x0, double L, double mu, const RunLimits& limits);

/// Finite, not diverged, and final f_gap strictly below the initial one.
bool is_stable(const Trace& trace);

struct ScanVerdict {
  int z = 0;
  double h = 0.0;
  bool stable = false;
  Outcome outcome = Outcome::budget_exhausted;
  double initial_f_gap = 0.0;
  double final_f_gap = 0.0;
};

struct ScanResult {
  int z = 0;
  double h = 0.0;
  std::vector<ScanVerdict> verdicts;  // in probe order (z descending)
};

class ScanFailure : public Error {
 public:
  ScanFailure(const std::string& what, std::vector<ScanVerdict> verdicts)
      : Error(what), verdicts_(std::move(verdicts)) {}
  const std::vector<ScanVerdict>& verdicts() const noexcept { return verdicts_; }

 private:
  std::vector<ScanVerdict> verdicts_;
};

/// Runs `run(h, probe_iters)` for h = 10^z, z from z_max down to z_min, and
/// returns the first stable z. Throws ScanFailure if none is stable.
using ProbeRun = std::function<Trace(double h, int probe_iters)>;
ScanResult stability_scan(const ProbeRun& run, int z_min, int z_max, int probe_iters);

/// E_{k+1} <= (1 - h/4) E_k for every consecutive pair of records. Records
/// without a Lyapunov value fail the check.
bool satisfies_per_step_rate(const Trace& trace);

struct Calibration {
  double c = 0.0;
  int exponent = 0;  // c = 2^exponent
  double step_size = 0.0;
  Trace trace;
};

/// Smallest c = 2^k, k in [k_min, k_max], for which a theorem-policy run satisfies
/// the per-step rate over the whole run and reaches limits.target.
/// Throws Error when no candidate works.
Calibration calibrate_theorem_constant(const ConditionedProblem& problem, const Vector& x0,
                                       const ButcherTableau& tableau, const RunLimits& limits,
                                       int k_min = -128, int k_max = 64);

}  // namespace rkopt
