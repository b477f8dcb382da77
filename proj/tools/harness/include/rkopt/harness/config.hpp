#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rkopt/dynamics.hpp"
#include "rkopt/errors.hpp"
#include "rkopt/objectives.hpp"
#include "rkopt/optimizers.hpp"
#include "rkopt/tableau.hpp"

namespace rkopt::harness {

/// Invalid experiment configuration; the message names the offending flag.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ObjectiveKind { quadratic, logistic };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::quadratic;
  // quadratic: lambda log-spaced over [1/kappa, 1] in dimension d, unless
  // lambda_spec is given ("logspace:D:LO:HI", "linspace:D:LO:HI" or "l1,l2,...").
  double kappa = 500.0;
  std::optional<std::string> lambda_spec;
  // Dimension; defaults to 50 (quadratic) or 20 (logistic).
  std::optional<int> d;
  // logistic: n points in total, split evenly between the two classes.
  int n = 200;
  double margin = 5.0;
  double gamma = 1e-2;
  std::uint64_t seed = 42;
};

enum class OptimizerKind { gd, nag, dd };

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::gd;
  std::string name;
  std::optional<double> step;                // gd:H
  std::optional<ButcherTableau> tableau;     // dd
};

struct ExperimentConfig {
  ObjectiveSpec objective;
  std::vector<std::string> optimizers{"dd"};
  std::optional<std::filesystem::path> tableau_file;
  int order = 4;
  std::string policy = "scan:-6:2";
  std::int64_t budget = 1'000'000;
  double target = 1e-9;
  std::optional<std::filesystem::path> out;
  int probe_iters = 100;
  std::int64_t record_every = 1;
  // Exponent range for the logistic smoothness scan, L = 10^z.
  int smoothness_z_max = 8;
};

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& config);

/// Theorem policy whose constant is calibrated on the problem itself.
inline constexpr std::string_view kAutoTheoremPolicy = "theorem:auto";

/// "fixed:H", "theorem:C" or "scan:ZMIN:ZMAX". probe_iters fills ScanStep.
StepPolicy parse_policy(std::string_view text, int probe_iters);

/// "gd", "gd:H", "nag", "dd" (uses --order / --tableau-file) or "dd-s<k>" (built-in order k).
OptimizerSpec parse_optimizer(std::string_view token, const ExperimentConfig& config);

Vector parse_lambda_spec(std::string_view text);

/// Objective, starting point and conditioned problem for one experiment.
struct BuiltProblem {
  ObjectivePtr objective;
  Vector x0;
  ConditionedProblem problem;
};

/// Quadratic starts at all ones, logistic at zero.
BuiltProblem build_problem(const ObjectiveSpec& spec);

}  // namespace rkopt::harness
