#pragma once

#include "rkopt/objectives.hpp"
#include "rkopt/order_conditions.hpp"
#include "rkopt/types.hpp"

namespace rkopt {

/// Objective paired with the constants the dynamics are tuned to.
/// Q = L / mu >= 1. L may differ from objective.L() (e.g. a scanned value).
class ConditionedProblem {
 public:
  explicit ConditionedProblem(ObjectivePtr objective);
  ConditionedProblem(ObjectivePtr objective, double mu, double L);

  const Objective& objective() const noexcept { return *objective_; }
  const ObjectivePtr& objective_ptr() const noexcept { return objective_; }
  double mu() const noexcept { return mu_; }
  double L() const noexcept { return L_; }
  double Q() const noexcept { return L_ / mu_; }
  double sqrt_Q() const noexcept { return sqrt_q_; }
  int dimension() const { return objective_->dimension(); }

 private:
  ObjectivePtr objective_;
  double mu_;
  double L_;
  double sqrt_q_;
};

/// Augmented state of the rescaled heavy-ball system: w = v / sqrt(Q) and x.
struct HeavyBallState {
  Vector w;
  Vector x;

  /// Starts at rest: w = 0.
  static HeavyBallState at_rest(const Vector& x0);
  /// Splits y = [w; x].
  static HeavyBallState from_flat(const Vector& y);
  Vector to_flat() const;
  int dimension() const noexcept { return static_cast<int>(x.size()); }
};

/// Unscaled state (v, x) of the first-order heavy-ball system.
struct VelocityState {
  Vector v;
  Vector x;

  static VelocityState from_flat(const Vector& y);
  Vector to_flat() const;
};

/// (w', x') = (-2w - grad f(x) / (mu sqrt Q), sqrt Q w). One gradient evaluation.
/// Throws NumericError for a non-finite gradient.
HeavyBallState vector_field(const HeavyBallState& state, const ConditionedProblem& problem);

/// (v', x') = (-2v - grad f(x) / mu, v). One gradient evaluation.
VelocityState raw_vector_field(const VelocityState& state, const ConditionedProblem& problem);

/// vector_field on flat [w; x] vectors, for the integrators.
VectorField heavy_ball_field(const ConditionedProblem& problem);
/// raw_vector_field on flat [v; x] vectors.
VectorField raw_heavy_ball_field(const ConditionedProblem& problem);

/// Derivative oracle of the rescaled field on flat states; the derivative order
/// is limited by the objective's derivative_action.
TensorOracle heavy_ball_oracle(const ConditionedProblem& problem);

/// E(w, x) = 2 (f(x) - f*) / mu + Q/2 |w|^2 + 1/2 |x + sqrt(Q) w - x*|^2.
/// Throws CapabilityError when the optimum is unknown.
double lyapunov(const HeavyBallState& state, const ConditionedProblem& problem);

/// |F(y)|^2 <= 25 E(y).
bool field_norm_bound_check(const HeavyBallState& state, const ConditionedProblem& problem);

}  // namespace rkopt
