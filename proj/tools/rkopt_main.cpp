#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rkopt/harness/commands.hpp"
#include "rkopt/harness/verify.hpp"
#include "rkopt/tableau.hpp"

namespace {

using namespace rkopt;
using namespace rkopt::harness;

struct Flags {
  ExperimentConfig config;
  std::string objective = "quadratic";
  int d = 0;
  std::string lambda_spec;
  std::string tableau_file;
  std::string out;
  std::vector<std::string> optimizers;
};

void add_experiment_flags(CLI::App& cmd, Flags& f) {
  ExperimentConfig& c = f.config;
  cmd.add_option("--objective", f.objective, "quadratic or logistic")
      ->check(CLI::IsMember({"quadratic", "logistic"}))
      ->capture_default_str();
  cmd.add_option("--kappa", c.objective.kappa, "quadratic condition number")->capture_default_str();
  cmd.add_option("--lambda-spec", f.lambda_spec, "logspace:D:LO:HI, linspace:D:LO:HI or l1,l2,...");
  cmd.add_option("--d", f.d, "dimension (default 50 quadratic, 20 logistic)");
  cmd.add_option("--n", c.objective.n, "logistic: number of points")->capture_default_str();
  cmd.add_option("--margin", c.objective.margin, "logistic: class separation")->capture_default_str();
  cmd.add_option("--gamma", c.objective.gamma, "logistic: ridge weight")->capture_default_str();
  cmd.add_option("--seed", c.objective.seed, "data seed")->capture_default_str();
  cmd.add_option("--optimizer", f.optimizers, "gd, gd:H, nag, dd, dd-s<k> (repeatable)");
  cmd.add_option("--tableau-file", f.tableau_file, "JSON Butcher tableau for dd");
  cmd.add_option("--order", c.order, "built-in tableau order for dd (1-4)")->capture_default_str();
  cmd.add_option("--policy", c.policy, "fixed:H, theorem:C, theorem:auto or scan:ZMIN:ZMAX")
      ->capture_default_str();
  cmd.add_option("--budget", c.budget, "gradient evaluation budget")->capture_default_str();
  cmd.add_option("--target", c.target, "f_gap target")->capture_default_str();
  cmd.add_option("--out", f.out, "CSV output path");
  cmd.add_option("--probe", c.probe_iters, "iterations per stability probe")->capture_default_str();
  cmd.add_option("--record-every", c.record_every, "trace record stride")->capture_default_str();
}

ExperimentConfig finish(Flags& f) {
  ExperimentConfig c = f.config;
  c.objective.kind = f.objective == "logistic" ? ObjectiveKind::logistic : ObjectiveKind::quadratic;
  if (f.d != 0) c.objective.d = f.d;
  if (!f.lambda_spec.empty()) c.objective.lambda_spec = f.lambda_spec;
  if (!f.tableau_file.empty()) c.tableau_file = f.tableau_file;
  if (!f.out.empty()) c.out = f.out;
  if (!f.optimizers.empty()) c.optimizers = f.optimizers;
  return c;
}

bool diverged(const RunOutput& run) {
  return !run.trace || run.trace->outcome == Outcome::diverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runge-Kutta discretizations of the heavy-ball ODE"};
  app.require_subcommand(1);

  Flags run_flags;
  Flags compare_flags;
  Flags scan_flags;
  compare_flags.config.optimizers.clear();
  auto* run = app.add_subcommand("run", "single optimizer run, writes a trace CSV");
  add_experiment_flags(*run, run_flags);
  auto* compare = app.add_subcommand("compare", "several optimizers on one problem, long-format CSV");
  add_experiment_flags(*compare, compare_flags);
  auto* scan = app.add_subcommand("scan", "stability scan over h = 10^z");
  add_experiment_flags(*scan, scan_flags);

  std::string order_file;
  auto* check = app.add_subcommand("check-order", "certify the order of a tableau file");
  check->add_option("tableau", order_file, "JSON tableau file")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "property suites: order, lyapunov, lemmas, assumptions, all");
  verify->add_option("suite", suite, "suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*run) {
      const RunOutput out = cmd_run(finish(run_flags), std::cout);
      return diverged(out) ? kRunDiverged : kSuccess;
    }
    if (*compare) {
      const auto runs = cmd_compare(finish(compare_flags), std::cout);
      for (const auto& r : runs) {
        if (diverged(r)) return kRunDiverged;
      }
      return kSuccess;
    }
    if (*scan) {
      const ScanReport report = cmd_scan(finish(scan_flags), std::cout);
      return report.result ? kSuccess : kRunDiverged;
    }
    if (*check) {
      const OrderReport report = cmd_check_order(load_tableau_file(order_file), std::cout);
      return report.claimed_order_holds ? kSuccess : kVerificationFailed;
    }
    if (*verify) {
      const auto checks = run_verify_suite(suite);
      return print_verify_report(std::cout, checks) ? kSuccess : kVerificationFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kRunDiverged;
  } catch (const ScanFailure& e) {
    std::cerr << "scan failed: " << e.what() << '\n';
    return kRunDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kSuccess;
}
