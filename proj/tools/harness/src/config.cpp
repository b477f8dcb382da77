#include "rkopt/harness/config.hpp"

#include <charconv>
#include <cmath>

namespace rkopt::harness {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(std::string_view text, const std::string& field) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + std::string(text) + "' is not a number");
  }
}

int to_int(std::string_view text, const std::string& field) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(field + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  const ObjectiveSpec& o = config.objective;
  if (config.budget <= 0) throw ConfigError("--budget must be positive");
  if (!(config.target > 0.0)) throw ConfigError("--target must be positive");
  if (config.probe_iters < 1) throw ConfigError("--probe must be >= 1");
  if (config.record_every < 1) throw ConfigError("--record-every must be >= 1");
  if (o.d && *o.d < 1) throw ConfigError("--d must be >= 1");
  if (o.kind == ObjectiveKind::quadratic) {
    if (!(o.kappa >= 1.0)) throw ConfigError("--kappa must be >= 1");
  } else {
    if (o.n < 2 || o.n % 2 != 0) throw ConfigError("--n must be a positive even number");
    if (!(o.margin > 0.0)) throw ConfigError("--margin must be positive");
    if (!(o.gamma > 0.0)) throw ConfigError("--gamma must be positive");
  }
  if (config.optimizers.empty()) throw ConfigError("--optimizer is required");
  if (config.policy != kAutoTheoremPolicy) parse_policy(config.policy, config.probe_iters);
}

StepPolicy parse_policy(std::string_view text, int probe_iters) {
  const auto parts = split(text, ':');
  if (parts[0] == "fixed" && parts.size() == 2) {
    const double h = to_double(parts[1], "--policy fixed");
    if (!(h > 0.0)) throw ConfigError("--policy fixed: step must be positive");
    return FixedStep{h};
  }
  if (parts[0] == "theorem" && parts.size() == 2) {
    const double c = to_double(parts[1], "--policy theorem");
    if (!(c > 0.0)) throw ConfigError("--policy theorem: constant must be positive");
    return TheoremStep{c};
  }
  if (parts[0] == "scan" && parts.size() == 3) {
    const int lo = to_int(parts[1], "--policy scan");
    const int hi = to_int(parts[2], "--policy scan");
    if (lo > hi) throw ConfigError("--policy scan: empty exponent range " + std::string(text));
    return ScanStep{lo, hi, probe_iters};
  }
  throw ConfigError("--policy: expected fixed:H, theorem:C or scan:ZMIN:ZMAX, got '" + std::string(text) + "'");
}

OptimizerSpec parse_optimizer(std::string_view token, const ExperimentConfig& config) {
  OptimizerSpec spec;
  spec.name = std::string(token);
  if (token == "gd") {
    spec.kind = OptimizerKind::gd;
  } else if (token.starts_with("gd:")) {
    spec.kind = OptimizerKind::gd;
    spec.step = to_double(token.substr(3), "--optimizer gd");
    if (!(*spec.step > 0.0)) throw ConfigError("--optimizer gd: step must be positive");
  } else if (token == "nag") {
    spec.kind = OptimizerKind::nag;
  } else if (token == "dd") {
    spec.kind = OptimizerKind::dd;
    try {
      spec.tableau = config.tableau_file ? load_tableau_file(*config.tableau_file)
                                         : builtin_tableau(config.order);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--order: ") + e.what());
    }
    spec.name = "dd-" + spec.tableau->name();
  } else if (token.starts_with("dd-s")) {
    spec.kind = OptimizerKind::dd;
    try {
      spec.tableau = builtin_tableau(to_int(token.substr(4), "--optimizer"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--optimizer: ") + e.what());
    }
  } else {
    throw ConfigError("--optimizer: unknown optimizer '" + std::string(token) +
                      "' (expected gd, gd:H, nag, dd or dd-s<k>)");
  }
  return spec;
}

Vector parse_lambda_spec(std::string_view text) {
  const auto parts = split(text, ':');
  if ((parts[0] == "logspace" || parts[0] == "linspace") && parts.size() == 4) {
    const int d = to_int(parts[1], "--lambda-spec");
    const double lo = to_double(parts[2], "--lambda-spec");
    const double hi = to_double(parts[3], "--lambda-spec");
    if (d < 1 || !(lo > 0.0) || !(hi >= lo)) {
      throw ConfigError("--lambda-spec: need D >= 1 and 0 < LO <= HI");
    }
    if (parts[0] == "logspace") return log_spaced(d, lo, hi);
    Vector out(d);
    for (int i = 0; i < d; ++i) out[i] = d == 1 ? lo : lo + (hi - lo) * i / (d - 1);
    return out;
  }
  const auto items = split(text, ',');
  Vector out(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = to_double(items[i], "--lambda-spec");
    if (!(out[static_cast<Eigen::Index>(i)] > 0.0)) throw ConfigError("--lambda-spec: entries must be positive");
  }
  return out;
}

BuiltProblem build_problem(const ObjectiveSpec& spec) {
  if (spec.kind == ObjectiveKind::quadratic) {
    const Vector lambda = spec.lambda_spec ? parse_lambda_spec(*spec.lambda_spec)
                                           : log_spaced(spec.d.value_or(50), 1.0 / spec.kappa, 1.0);
    ObjectivePtr objective = quadratic(lambda);
    Vector x0 = Vector::Ones(lambda.size());
    ConditionedProblem problem(objective);
    return {objective, std::move(x0), std::move(problem)};
  }
  LabeledDataset data = gaussian_mixture_data(spec.n / 2, spec.d.value_or(20), spec.margin, spec.seed);
  ObjectivePtr objective = logistic(std::move(data), spec.gamma);
  Vector x0 = Vector::Zero(objective->dimension());
  ConditionedProblem problem(objective);
  return {objective, std::move(x0), std::move(problem)};
}

}  // namespace rkopt::harness
