#include "rkopt/order_conditions.hpp"

#include <cmath>

#include "rkopt/errors.hpp"

namespace rkopt {

std::vector<RootedTree> OrderCheck::violated() const {
  std::vector<RootedTree> out;
  for (const auto& c : conditions) {
    if (!c.satisfied) out.push_back(c.tree);
  }
  return out;
}

Vector elementary_differential(const RootedTree& tree, const TensorOracle& oracle, const Vector& y) {
  if (tree.is_leaf()) return oracle.field(y);
  const int m = static_cast<int>(tree.children().size());
  if (m > oracle.max_order) {
    throw CapabilityError("tree " + tree.to_string() + " needs derivative order " + std::to_string(m) +
                          " but the oracle provides up to " + std::to_string(oracle.max_order));
  }
  std::vector<Vector> args;
  args.reserve(m);
  for (const auto& child : tree.children()) args.push_back(elementary_differential(child, oracle, y));
  return oracle.derivative(y, args);
}

Vector solution_derivative(int q, const TensorOracle& oracle, const Vector& y) {
  if (q < 1) throw DomainError("derivative order must be >= 1");
  Vector sum = Vector::Zero(y.size());
  for (const auto& tree : enumerate_trees(q)) {
    sum += static_cast<double>(alpha(tree)) * elementary_differential(tree, oracle, y);
  }
  return sum;
}

namespace {

// Per-stage weights Phi_i(tree), i = 0..S-1.
std::vector<double> stage_weights(const ButcherTableau& tableau, const RootedTree& tree) {
  const int stages = tableau.stages();
  std::vector<double> weights(stages, 1.0);
  for (const auto& child : tree.children()) {
    const std::vector<double> inner = stage_weights(tableau, child);
    for (int i = 0; i < stages; ++i) {
      double sum = 0.0;
      for (int j = 0; j < i; ++j) sum += tableau.a(i, j) * inner[j];
      weights[i] *= sum;
    }
  }
  return weights;
}

}  // namespace

double elementary_weight(const ButcherTableau& tableau, const RootedTree& tree) {
  const std::vector<double> weights = stage_weights(tableau, tree);
  double phi = 0.0;
  auto b = tableau.b();
  for (int i = 0; i < tableau.stages(); ++i) phi += b[i] * weights[i];
  return phi;
}

OrderCheck check_order(const ButcherTableau& tableau, int s, double tol) {
  if (s < 1) throw DomainError("order must be >= 1");
  OrderCheck check;
  check.passed = true;
  for (int q = 1; q <= s; ++q) {
    for (auto& tree : enumerate_trees(q)) {
      TreeCondition c;
      c.weight = elementary_weight(tableau, tree);
      c.expected = 1.0 / static_cast<double>(tree_density(tree));
      c.satisfied = std::abs(c.weight - c.expected) <= tol;
      c.tree = std::move(tree);
      check.passed = check.passed && c.satisfied;
      check.conditions.push_back(std::move(c));
    }
  }
  return check;
}

int certified_order(const ButcherTableau& tableau) {
  int order = 0;
  for (int s = 1; s <= kMaxTreeOrder; ++s) {
    if (!check_order(tableau, s).passed) break;
    order = s;
  }
  return order;
}

OrderMeasurement measure_order(const ButcherTableau& tableau, const VectorField& field,
                               const Vector& y0, double t_end,
                               const OrderMeasurementOptions& options) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (options.k_max <= options.k_min) throw DomainError("need k_max > k_min");

  const Vector exact = reference_solve(field, y0, t_end, options.reference_tol);

  OrderMeasurement m;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = options.k_min; k <= options.k_max; ++k) {
    const std::int64_t n = std::int64_t{1} << k;
    const double h = t_end / static_cast<double>(n);
    const double err = (integrate_to(tableau, field, y0, t_end, n) - exact).lpNorm<Eigen::Infinity>();
    m.step_sizes.push_back(h);
    if (err > options.noise_floor) {
      m.errors.push_back(err);
      xs.push_back(std::log(h));
      ys.push_back(std::log(err));
    } else {
      m.errors.push_back(std::nan(""));
    }
  }
  if (xs.size() < 2) {
    throw IndeterminateOrderError("fewer than two step sizes produced errors above the noise floor");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  m.slope = sxy / sxx;
  return m;
}

double measured_order(const ButcherTableau& tableau, const VectorField& field, const Vector& y0,
                      double t_end, const OrderMeasurementOptions& options) {
  return measure_order(tableau, field, y0, t_end, options).slope;
}

}  // namespace rkopt
