#include "rkopt/optimizers.hpp"

#include <cmath>
#include <limits>

#include "rkopt/integrate.hpp"

namespace rkopt {

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::converged: return "converged";
    case Outcome::budget_exhausted: return "budget_exhausted";
    case Outcome::diverged: return "diverged";
  }
  return "unknown";
}

std::optional<std::int64_t> Trace::evals_to_reach(double target) const {
  for (const auto& r : records) {
    if (r.f_gap <= target) return r.grad_evals;
  }
  return std::nullopt;
}

double theorem_exponent(int s) {
  if (s < 1) throw DomainError("order must be >= 1");
  return static_cast<double>(s + 3) / (2.0 * (s + 1));
}

double theoretical_step_size(double E0, double Q, int s, double c) {
  if (!(E0 > 0.0) || !(Q > 0.0) || !(c > 0.0)) {
    throw DomainError("theoretical step size needs positive E0, Q and c");
  }
  const double g = theorem_exponent(s);
  return std::min(std::pow(E0, -g), std::pow(Q, -g)) / (2.0 * std::pow(c, 1.0 / (s + 1)));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_limits(const RunLimits& limits) {
  if (limits.budget <= 0) throw DomainError("budget must be positive");
  if (!(limits.target >= 0.0)) throw DomainError("target must be nonnegative");
  if (limits.record_stride < 1) throw DomainError("record stride must be >= 1");
}

bool runaway(const Vector& v) {
  return !v.allFinite() || v.lpNorm<Eigen::Infinity>() > kDivergenceThreshold;
}

// Collects records honouring the stride; the pending record is kept so the
// final iterate is always present.
class TraceBuilder {
 public:
  explicit TraceBuilder(std::int64_t stride) : stride_(stride) {}

  void push(TraceRecord record) {
    if (record.iteration == 0 || record.iteration % stride_ == 0) {
      trace_.records.push_back(record);
      pending_.reset();
    } else {
      pending_ = record;
    }
  }

  Trace finish(Outcome outcome) {
    if (pending_) trace_.records.push_back(*pending_);
    trace_.outcome = outcome;
    return std::move(trace_);
  }

 private:
  std::int64_t stride_;
  Trace trace_;
  std::optional<TraceRecord> pending_;
};

// Called after each accepted step with (previous E, new E); returning false aborts.
using StepMonitor = std::function<bool(double, double)>;

Trace run_direct_discretization(const ConditionedProblem& problem, const Vector& x0,
                                const ButcherTableau& tableau, double h, const RunLimits& limits,
                                const StepMonitor& monitor = {}) {
  validate_limits(limits);
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("step size must be positive");
  const Objective& objective = problem.objective();
  const Optimum& opt = objective.require_optimum();
  const VectorField field = heavy_ball_field(problem);
  const int stages = tableau.stages();

  TraceBuilder builder(limits.record_stride);
  HeavyBallState state = HeavyBallState::at_rest(x0);
  Vector y = state.to_flat();
  double energy = lyapunov(state, problem);
  double gap = objective.value(x0) - opt.f_star;
  builder.push({0, 0, gap, energy, h});
  if (gap <= limits.target) return builder.finish(Outcome::converged);

  std::int64_t evals = 0;
  for (std::int64_t k = 1;; ++k) {
    if (evals + stages > limits.budget) return builder.finish(Outcome::budget_exhausted);
    try {
      y = rk_step(tableau, field, y, h);
    } catch (const DivergenceError&) {
      builder.push({k, evals + stages, kNaN, std::nullopt, h});
      return builder.finish(Outcome::diverged);
    } catch (const NumericError&) {
      builder.push({k, evals + stages, kNaN, std::nullopt, h});
      return builder.finish(Outcome::diverged);
    }
    evals += stages;
    state = HeavyBallState::from_flat(y);
    const double next_energy = lyapunov(state, problem);
    gap = objective.value(state.x) - opt.f_star;
    if (!std::isfinite(gap) || !std::isfinite(next_energy)) {
      builder.push({k, evals, gap, std::nullopt, h});
      return builder.finish(Outcome::diverged);
    }
    builder.push({k, evals, gap, next_energy, h});
    if (monitor && !monitor(energy, next_energy)) return builder.finish(Outcome::diverged);
    energy = next_energy;
    if (gap <= limits.target) return builder.finish(Outcome::converged);
  }
}

double resolve_step(const ConditionedProblem& problem, const Vector& x0, const ButcherTableau& tableau,
                    const StepPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedStep>(&policy)) return fixed->h;
  if (const auto* theorem = std::get_if<TheoremStep>(&policy)) {
    const double e0 = lyapunov(HeavyBallState::at_rest(x0), problem);
    return theoretical_step_size(e0, problem.Q(), tableau.claimed_order(), theorem->c);
  }
  const auto& scan = std::get<ScanStep>(policy);
  const ProbeRun probe = [&](double h, int iters) {
    const RunLimits probe_limits{static_cast<std::int64_t>(iters) * tableau.stages(), 0.0, 1};
    return run_direct_discretization(problem, x0, tableau, h, probe_limits);
  };
  return stability_scan(probe, scan.z_min, scan.z_max, scan.probe_iters).h;
}

}  // namespace

Trace direct_discretization(const ConditionedProblem& problem, const Vector& x0,
                            const ButcherTableau& tableau, const StepPolicy& policy,
                            const RunLimits& limits) {
  if (x0.size() != problem.dimension()) throw DomainError("x0 has the wrong dimension");
  const double h = resolve_step(problem, x0, tableau, policy);
  return run_direct_discretization(problem, x0, tableau, h, limits);
}

Trace gradient_descent(const Objective& objective, const Vector& x0, double h, const RunLimits& limits) {
  validate_limits(limits);
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  if (x0.size() != objective.dimension()) throw DomainError("x0 has the wrong dimension");
  const double f_star = objective.require_optimum().f_star;

  TraceBuilder builder(limits.record_stride);
  Vector x = x0;
  double gap = objective.value(x) - f_star;
  builder.push({0, 0, gap, std::nullopt, h});
  if (gap <= limits.target) return builder.finish(Outcome::converged);

  for (std::int64_t k = 1;; ++k) {
    if (k > limits.budget) return builder.finish(Outcome::budget_exhausted);
    x -= h * objective.gradient(x);
    gap = objective.value(x) - f_star;
    if (runaway(x) || !std::isfinite(gap)) {
      builder.push({k, k, kNaN, std::nullopt, h});
      return builder.finish(Outcome::diverged);
    }
    builder.push({k, k, gap, std::nullopt, h});
    if (gap <= limits.target) return builder.finish(Outcome::converged);
  }
}

Trace nag(const Objective& objective, const Vector& x0, double L, double mu, const RunLimits& limits) {
  validate_limits(limits);
  if (!(mu > 0.0) || !(L >= mu)) throw DomainError("NAG needs L >= mu > 0");
  if (x0.size() != objective.dimension()) throw DomainError("x0 has the wrong dimension");
  const double f_star = objective.require_optimum().f_star;
  const double sq = std::sqrt(L / mu);
  const double beta = (sq - 1.0) / (sq + 1.0);
  const double h = 1.0 / L;

  TraceBuilder builder(limits.record_stride);
  Vector x = x0;
  Vector z = x0;
  double gap = objective.value(x) - f_star;
  builder.push({0, 0, gap, std::nullopt, h});
  if (gap <= limits.target) return builder.finish(Outcome::converged);

  for (std::int64_t k = 1;; ++k) {
    if (k > limits.budget) return builder.finish(Outcome::budget_exhausted);
    Vector next = z - h * objective.gradient(z);
    z = next + beta * (next - x);
    x = std::move(next);
    gap = objective.value(x) - f_star;
    if (runaway(x) || runaway(z) || !std::isfinite(gap)) {
      builder.push({k, k, kNaN, std::nullopt, h});
      return builder.finish(Outcome::diverged);
    }
    builder.push({k, k, gap, std::nullopt, h});
    if (gap <= limits.target) return builder.finish(Outcome::converged);
  }
}

bool is_stable(const Trace& trace) {
  if (trace.outcome == Outcome::diverged || trace.records.empty()) return false;
  for (const auto& r : trace.records) {
    if (!std::isfinite(r.f_gap)) return false;
  }
  return trace.final().f_gap < trace.initial().f_gap;
}

ScanResult stability_scan(const ProbeRun& run, int z_min, int z_max, int probe_iters) {
  if (z_min > z_max) throw DomainError("empty exponent range");
  if (probe_iters < 1) throw DomainError("probe iterations must be >= 1");
  ScanResult result;
  for (int z = z_max; z >= z_min; --z) {
    ScanVerdict v;
    v.z = z;
    v.h = std::pow(10.0, z);
    const Trace trace = run(v.h, probe_iters);
    v.stable = is_stable(trace);
    v.outcome = trace.outcome;
    v.initial_f_gap = trace.initial().f_gap;
    v.final_f_gap = trace.final().f_gap;
    result.verdicts.push_back(v);
    if (v.stable) {
      result.z = z;
      result.h = v.h;
      return result;
    }
  }
  throw ScanFailure("no stable step size 10^z for z in [" + std::to_string(z_min) + ", " +
                        std::to_string(z_max) + "]",
                    std::move(result.verdicts));
}

bool satisfies_per_step_rate(const Trace& trace) {
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const auto& prev = trace.records[k - 1];
    const auto& next = trace.records[k];
    if (!prev.lyapunov || !next.lyapunov) return false;
    const double factor = 1.0 - next.step_size / 4.0;
    if (next.iteration - prev.iteration != 1) return false;
    if (!(*next.lyapunov <= factor * *prev.lyapunov)) return false;
  }
  return true;
}

Calibration calibrate_theorem_constant(const ConditionedProblem& problem, const Vector& x0,
                                       const ButcherTableau& tableau, const RunLimits& limits,
                                       int k_min, int k_max) {
  const double e0 = lyapunov(HeavyBallState::at_rest(x0), problem);
  const int s = tableau.claimed_order();
  RunLimits full = limits;
  full.record_stride = 1;
  for (int k = k_min; k <= k_max; ++k) {
    const double c = std::ldexp(1.0, k);
    const double h = theoretical_step_size(e0, problem.Q(), s, c);
    const double factor = 1.0 - h / 4.0;
    const StepMonitor monitor = [factor](double prev, double next) { return next <= factor * prev; };
    Trace trace = run_direct_discretization(problem, x0, tableau, h, full, monitor);
    if (trace.outcome == Outcome::converged && satisfies_per_step_rate(trace)) {
      return Calibration{c, k, h, std::move(trace)};
    }
  }
  throw Error("no constant c = 2^k with k in [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
              "] satisfies the per-step contraction for " + tableau.name());
}

}  // namespace rkopt
