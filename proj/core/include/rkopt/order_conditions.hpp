#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rkopt/integrate.hpp"
#include "rkopt/rooted_tree.hpp"
#include "rkopt/tableau.hpp"
#include "rkopt/types.hpp"

namespace rkopt {

/// Field evaluation plus multilinear derivative actions of a vector field.
///
/// derivative(y, {u_1..u_m}) returns the m-th derivative tensor of F at y applied
/// to u_1..u_m, for 1 <= m <= max_order. The action must be symmetric in its
/// arguments.
struct TensorOracle {
  std::function<Vector(const Vector&)> field;
  std::function<Vector(const Vector&, std::span<const Vector>)> derivative;
  int max_order = 0;
};

/// F(tree)(y): F(y) for the leaf, grad^m F(y)[F(t_1)(y), ..., F(t_m)(y)] otherwise.
/// Throws CapabilityError if a node's out-degree exceeds oracle.max_order.
Vector elementary_differential(const RootedTree& tree, const TensorOracle& oracle, const Vector& y);

/// q-th time derivative of the exact flow at y: sum over |t| = q of alpha(t) F(t)(y).
Vector solution_derivative(int q, const TensorOracle& oracle, const Vector& y);

/// Phi(tree) = sum_i b_i Phi_i(tree), with Phi_i(leaf) = 1 and
/// Phi_i([t_1..t_m]) = prod_k sum_j a_ij Phi_j(t_k).
double elementary_weight(const ButcherTableau& tableau, const RootedTree& tree);

inline constexpr double kOrderConditionTolerance = 1e-10;

struct TreeCondition {
  RootedTree tree;
  double weight = 0.0;    // Phi(tree)
  double expected = 0.0;  // 1 / gamma(tree)
  bool satisfied = false;
};

struct OrderCheck {
  bool passed = false;
  std::vector<TreeCondition> conditions;  // every tree with 1 <= |t| <= s

  std::vector<RootedTree> violated() const;
};

/// Algebraic order certificate: |Phi(t) - 1/gamma(t)| <= tol for every |t| <= s.
OrderCheck check_order(const ButcherTableau& tableau, int s, double tol = kOrderConditionTolerance);

/// Largest s <= kMaxTreeOrder that check_order accepts (0 if none).
int certified_order(const ButcherTableau& tableau);

struct OrderMeasurementOptions {
  int k_min = 2;  // step sizes h_k = t_end / 2^k for k in [k_min, k_max]
  int k_max = 7;
  double reference_tol = 1e-12;
  // Errors below this are considered noise and dropped from the fit.
  double noise_floor = 1e-12;
};

struct OrderMeasurement {
  double slope = 0.0;
  std::vector<double> step_sizes;
  std::vector<double> errors;  // max-norm global error at t_end, NaN if dropped
};

/// Empirical global order: least-squares slope of log(error) against log(h).
/// Throws IndeterminateOrderError when fewer than two errors clear the noise floor.
OrderMeasurement measure_order(const ButcherTableau& tableau, const VectorField& field,
                               const Vector& y0, double t_end,
                               const OrderMeasurementOptions& options = {});

double measured_order(const ButcherTableau& tableau, const VectorField& field, const Vector& y0,
                      double t_end, const OrderMeasurementOptions& options = {});

}  // namespace rkopt
