#include "rkopt/harness/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <set>

#include "rkopt/harness/csv.hpp"
#include "rkopt/order_conditions.hpp"

namespace rkopt::harness {

namespace {

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot open output file " + path.string());
  return out;
}

RunLimits limits_of(const ExperimentConfig& config) {
  return RunLimits{config.budget, config.target, config.record_every};
}

std::string describe(const StepPolicy& policy) {
  if (const auto* f = std::get_if<FixedStep>(&policy)) return "fixed h=" + format_double(f->h);
  if (const auto* t = std::get_if<TheoremStep>(&policy)) return "theorem c=" + format_double(t->c);
  const auto& s = std::get<ScanStep>(policy);
  return "scan z in [" + std::to_string(s.z_min) + ", " + std::to_string(s.z_max) + "]";
}

RunOutput execute(const OptimizerSpec& spec, const BuiltProblem& built, const SharedConstants& k,
                  const StepPolicy& dd_policy, const RunLimits& limits) {
  RunOutput out;
  out.name = spec.name;
  try {
    switch (spec.kind) {
      case OptimizerKind::gd: {
        const double h = spec.step.value_or(k.gd_step);
        out.trace = gradient_descent(*built.objective, built.x0, h, limits);
        out.step_size = h;
        out.note = spec.step ? "fixed h" : "h = 1/L";
        break;
      }
      case OptimizerKind::nag:
        out.trace = nag(*built.objective, built.x0, k.nag_L, k.nag_mu, limits);
        out.step_size = 1.0 / k.nag_L;
        out.note = "L=" + format_double(k.nag_L) + " mu=" + format_double(k.nag_mu);
        break;
      case OptimizerKind::dd: {
        StepPolicy policy = dd_policy;
        out.note = describe(dd_policy) + " Q=" + format_double(k.dd_problem.Q());
        out.trace = direct_discretization(k.dd_problem, built.x0, *spec.tableau, policy, limits);
        // A step that passes the short probe can still fail over the full run; rescan below it.
        while (out.trace->outcome != Outcome::converged && std::holds_alternative<ScanStep>(policy)) {
          auto& scan = std::get<ScanStep>(policy);
          const int z = static_cast<int>(std::lround(std::log10(out.trace->initial().step_size)));
          if (z - 1 < scan.z_min) break;
          out.note += "; h=" + format_double(out.trace->initial().step_size) + " " +
                      to_string(out.trace->outcome) + ", rescanned";
          scan.z_max = z - 1;
          try {
            out.trace = direct_discretization(k.dd_problem, built.x0, *spec.tableau, policy, limits);
          } catch (const ScanFailure&) {
            out.note += " without a stable step";
            break;
          }
        }
        out.step_size = out.trace->initial().step_size;
        break;
      }
    }
  } catch (const ScanFailure& e) {
    out.error = e.what();
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

void summarize(std::ostream& log, const RunOutput& run, double target) {
  log << run.name << ": ";
  if (!run.trace) {
    log << "error: " << run.error << '\n';
    return;
  }
  const Trace& t = *run.trace;
  log << "outcome=" << to_string(t.outcome) << " f_gap=" << format_double(t.final().f_gap)
      << " grad_evals=" << t.final().grad_evals << " iterations=" << t.final().iteration
      << " step=" << format_double(run.step_size);
  if (auto evals = t.evals_to_reach(target)) log << " evals_to_target=" << *evals;
  if (!run.note.empty()) log << " (" << run.note << ")";
  log << '\n';
}

SharedConstants analytic_constants(const BuiltProblem& built) {
  return {1.0 / built.objective->L(), built.objective->L(), built.objective->mu(), built.problem};
}

}  // namespace

RunOutput cmd_run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  if (config.optimizers.size() != 1) throw ConfigError("run takes exactly one --optimizer");
  const OptimizerSpec spec = parse_optimizer(config.optimizers.front(), config);
  const BuiltProblem built = build_problem(config.objective);
  const SharedConstants constants = analytic_constants(built);

  RunOutput run;
  if (spec.kind == OptimizerKind::dd && config.policy == kAutoTheoremPolicy) {
    const Calibration cal =
        calibrate_theorem_constant(built.problem, built.x0, *spec.tableau, limits_of(config));
    run.name = spec.name;
    run.trace = cal.trace;
    run.step_size = cal.step_size;
    run.note = "theorem policy, calibrated c=2^" + std::to_string(cal.exponent) + "=" +
               format_double(cal.c) + " (empirical calibration, not a proved constant)";
  } else {
    const StepPolicy policy = spec.kind == OptimizerKind::dd
                                  ? parse_policy(config.policy, config.probe_iters)
                                  : StepPolicy{FixedStep{constants.gd_step}};
    run = execute(spec, built, constants, policy, limits_of(config));
    if (spec.kind == OptimizerKind::dd && std::holds_alternative<TheoremStep>(policy)) {
      run.note += " (theorem constant supplied by the user, uncalibrated)";
    }
  }
  if (!run.trace) throw Error(run.error);
  if (config.out) {
    auto out = open_output(*config.out);
    write_trace_csv(out, *run.trace);
  }
  summarize(log, run, config.target);
  return run;
}

double scan_smoothness(const Objective& objective, const Vector& x0, double mu, int z_max,
                       int probe_iters, std::ostream* log) {
  const int z_min = static_cast<int>(std::ceil(std::log10(mu) - 1e-12));
  if (z_min > z_max) throw ConfigError("smoothness scan range is empty");
  // Scanning h = 10^-z from large to small steps visits L = 10^z from small to large.
  const ProbeRun gd_probe = [&](double h, int iters) {
    return gradient_descent(objective, x0, h, RunLimits{iters, 0.0, 1});
  };
  const ProbeRun nag_probe = [&](double h, int iters) {
    return nag(objective, x0, std::max(1.0 / h, mu), mu, RunLimits{iters, 0.0, 1});
  };
  const ScanResult gd = stability_scan(gd_probe, -z_max, -z_min, probe_iters);
  const ScanResult ng = stability_scan(nag_probe, -z_max, -z_min, probe_iters);
  const double L = std::max(1.0 / gd.h, 1.0 / ng.h);
  if (log) {
    *log << "smoothness scan: gd stable at L=" << format_double(1.0 / gd.h)
         << ", nag stable at L=" << format_double(1.0 / ng.h) << " -> L=" << format_double(L) << '\n';
  }
  return L;
}

std::vector<RunOutput> cmd_compare(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  if (config.optimizers.size() < 2) throw ConfigError("compare needs at least two --optimizer values");
  std::vector<OptimizerSpec> specs;
  std::set<std::string> names;
  for (const auto& token : config.optimizers) {
    specs.push_back(parse_optimizer(token, config));
    if (!names.insert(specs.back().name).second) {
      throw ConfigError("--optimizer: duplicate optimizer '" + specs.back().name + "'");
    }
  }

  const BuiltProblem built = build_problem(config.objective);
  SharedConstants constants = analytic_constants(built);
  if (config.objective.kind == ObjectiveKind::logistic) {
    const double mu = config.objective.gamma;
    const double L = scan_smoothness(*built.objective, built.x0, mu, config.smoothness_z_max,
                                     config.probe_iters, &log);
    constants = SharedConstants{1.0 / L, L, mu, ConditionedProblem(built.objective, mu, L)};
  }

  StepPolicy dd_policy = ScanStep{-6, 2, config.probe_iters};
  if (config.policy != kAutoTheoremPolicy) {
    const StepPolicy requested = parse_policy(config.policy, config.probe_iters);
    if (std::holds_alternative<ScanStep>(requested)) {
      dd_policy = requested;
    } else {
      log << "compare: direct discretization steps are always scanned; ignoring --policy "
          << config.policy << '\n';
    }
  }

  const RunLimits limits = limits_of(config);
  std::vector<std::future<RunOutput>> pending;
  for (const auto& spec : specs) {
    pending.push_back(std::async(std::launch::async, [&, spec] {
      return execute(spec, built, constants, dd_policy, limits);
    }));
  }
  std::vector<RunOutput> runs;
  for (auto& f : pending) runs.push_back(f.get());

  for (const auto& run : runs) summarize(log, run, config.target);
  if (config.out) {
    auto out = open_output(*config.out);
    write_compare_header(out);
    for (const auto& run : runs) {
      if (run.trace) write_compare_rows(out, run.name, *run.trace);
    }
  }
  return runs;
}

ScanReport cmd_scan(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const OptimizerSpec spec = parse_optimizer(config.optimizers.front(), config);
  const BuiltProblem built = build_problem(config.objective);
  ScanStep range{-6, 2, config.probe_iters};
  if (config.policy != kAutoTheoremPolicy) {
    const StepPolicy requested = parse_policy(config.policy, config.probe_iters);
    if (const auto* s = std::get_if<ScanStep>(&requested)) range = *s;
  }

  ProbeRun probe;
  switch (spec.kind) {
    case OptimizerKind::gd:
      probe = [&](double h, int iters) {
        return gradient_descent(*built.objective, built.x0, h, RunLimits{iters, 0.0, 1});
      };
      break;
    case OptimizerKind::nag:
      probe = [&](double h, int iters) {
        const double mu = built.objective->mu();
        return nag(*built.objective, built.x0, std::max(1.0 / h, mu), mu, RunLimits{iters, 0.0, 1});
      };
      break;
    case OptimizerKind::dd:
      probe = [&](double h, int iters) {
        return direct_discretization(built.problem, built.x0, *spec.tableau, FixedStep{h},
                                     RunLimits{std::int64_t{iters} * spec.tableau->stages(), 0.0, 1});
      };
      break;
  }

  ScanReport report;
  report.optimizer = spec.name;
  try {
    ScanResult result = stability_scan(probe, range.z_min, range.z_max, range.probe_iters);
    report.verdicts = result.verdicts;
    report.result = std::move(result);
  } catch (const ScanFailure& e) {
    report.verdicts = e.verdicts();
  }

  for (const auto& v : report.verdicts) {
    log << spec.name << " z=" << v.z << " h=" << format_double(v.h) << ' '
        << (v.stable ? "stable" : "unstable") << " f_gap " << format_double(v.initial_f_gap) << " -> "
        << format_double(v.final_f_gap) << " (" << to_string(v.outcome) << ")\n";
  }
  if (report.result) {
    log << spec.name << ": selected z=" << report.result->z << " h=" << format_double(report.result->h)
        << '\n';
  } else {
    log << spec.name << ": no stable step size in [" << range.z_min << ", " << range.z_max << "]\n";
  }

  if (config.out) {
    const bool fresh = !std::filesystem::exists(*config.out) || std::filesystem::file_size(*config.out) == 0;
    auto out = open_output(*config.out, std::ios::app);
    if (fresh) out << "optimizer,z,h,stable,outcome,initial_f_gap,final_f_gap\n";
    for (const auto& v : report.verdicts) {
      out << spec.name << ',' << v.z << ',' << format_double(v.h) << ',' << (v.stable ? 1 : 0) << ','
          << to_string(v.outcome) << ',' << format_double(v.initial_f_gap) << ','
          << format_double(v.final_f_gap) << '\n';
    }
  }
  return report;
}

OrderReport cmd_check_order(const ButcherTableau& tableau, std::ostream& log) {
  OrderReport report{tableau, 0, false};
  log << "tableau " << tableau.name() << ": stages=" << tableau.stages()
      << " claimed order=" << tableau.claimed_order() << '\n';
  const int top = std::min(tableau.claimed_order() + 1, kMaxTreeOrder);
  bool still_passing = true;
  for (int q = 1; q <= top; ++q) {
    std::vector<RootedTree> violated;
    std::size_t count = 0;
    double worst = 0.0;
    for (const auto& tree : enumerate_trees(q)) {
      ++count;
      const double residual =
          std::abs(elementary_weight(tableau, tree) - 1.0 / static_cast<double>(tree_density(tree)));
      worst = std::max(worst, residual);
      if (residual > kOrderConditionTolerance) violated.push_back(tree);
    }
    log << "order " << q << ": " << (violated.empty() ? "pass" : "FAIL") << " (" << count
        << (count == 1 ? " condition" : " conditions") << ", max residual " << format_double(worst) << ")";
    if (!violated.empty()) {
      log << " violated:";
      for (const auto& t : violated) log << ' ' << t.to_string();
    }
    log << '\n';
    if (still_passing && violated.empty()) report.certified_order = q;
    still_passing = still_passing && violated.empty();
  }
  report.claimed_order_holds = report.certified_order >= tableau.claimed_order();
  log << "certified order: " << report.certified_order << '\n';
  return report;
}

}  // namespace rkopt::harness
