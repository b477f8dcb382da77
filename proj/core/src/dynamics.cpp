#include "rkopt/dynamics.hpp"

#include <cmath>

#include "rkopt/errors.hpp"

namespace rkopt {

ConditionedProblem::ConditionedProblem(ObjectivePtr objective)
    : ConditionedProblem(objective, objective->mu(), objective->L()) {}

ConditionedProblem::ConditionedProblem(ObjectivePtr objective, double mu, double L)
    : objective_(std::move(objective)), mu_(mu), L_(L), sqrt_q_(std::sqrt(L / mu)) {
  if (!objective_) throw DomainError("problem needs an objective");
  if (!(mu > 0.0) || !(L >= mu) || !std::isfinite(L)) {
    throw DomainError("problem constants need L >= mu > 0");
  }
}

HeavyBallState HeavyBallState::at_rest(const Vector& x0) { return {Vector::Zero(x0.size()), x0}; }

HeavyBallState HeavyBallState::from_flat(const Vector& y) {
  if (y.size() % 2 != 0) throw DomainError("flat heavy-ball state must have even length");
  const Eigen::Index d = y.size() / 2;
  return {y.head(d), y.tail(d)};
}

Vector HeavyBallState::to_flat() const {
  Vector y(w.size() + x.size());
  y << w, x;
  return y;
}

VelocityState VelocityState::from_flat(const Vector& y) {
  if (y.size() % 2 != 0) throw DomainError("flat velocity state must have even length");
  const Eigen::Index d = y.size() / 2;
  return {y.head(d), y.tail(d)};
}

Vector VelocityState::to_flat() const {
  Vector y(v.size() + x.size());
  y << v, x;
  return y;
}

namespace {

Vector checked_gradient(const Objective& objective, const Vector& x) {
  Vector g = objective.gradient(x);
  if (!g.allFinite()) throw NumericError("objective gradient is non-finite", x);
  return g;
}

}  // namespace

HeavyBallState vector_field(const HeavyBallState& state, const ConditionedProblem& problem) {
  if (state.w.size() != state.x.size()) throw DomainError("w and x must have equal dimension");
  const Vector g = checked_gradient(problem.objective(), state.x);
  const double sq = problem.sqrt_Q();
  return {-2.0 * state.w - g / (problem.mu() * sq), sq * state.w};
}

VelocityState raw_vector_field(const VelocityState& state, const ConditionedProblem& problem) {
  if (state.v.size() != state.x.size()) throw DomainError("v and x must have equal dimension");
  const Vector g = checked_gradient(problem.objective(), state.x);
  return {-2.0 * state.v - g / problem.mu(), state.v};
}

VectorField heavy_ball_field(const ConditionedProblem& problem) {
  return [problem](const Vector& y) {
    return vector_field(HeavyBallState::from_flat(y), problem).to_flat();
  };
}

VectorField raw_heavy_ball_field(const ConditionedProblem& problem) {
  return [problem](const Vector& y) {
    return raw_vector_field(VelocityState::from_flat(y), problem).to_flat();
  };
}

TensorOracle heavy_ball_oracle(const ConditionedProblem& problem) {
  TensorOracle oracle;
  oracle.field = heavy_ball_field(problem);
  oracle.max_order = problem.objective().max_derivative_order();
  oracle.derivative = [problem](const Vector& y, std::span<const Vector> dirs) -> Vector {
    const Eigen::Index d = y.size() / 2;
    const double sq = problem.sqrt_Q();
    const Vector x = y.tail(d);
    std::vector<Vector> dx;
    dx.reserve(dirs.size());
    for (const Vector& u : dirs) dx.push_back(u.tail(d));
    const Vector curvature = problem.objective().derivative_action(x, dx);

    Vector out(y.size());
    if (dirs.size() == 1) {
      const Vector uw = dirs[0].head(d);
      out.head(d) = -2.0 * uw - curvature / (problem.mu() * sq);
      out.tail(d) = sq * uw;
    } else {
      out.head(d) = -curvature / (problem.mu() * sq);
      out.tail(d).setZero();
    }
    return out;
  };
  return oracle;
}

double lyapunov(const HeavyBallState& state, const ConditionedProblem& problem) {
  const Optimum& opt = problem.objective().require_optimum();
  const double sq = problem.sqrt_Q();
  const double gap = problem.objective().value(state.x) - opt.f_star;
  return 2.0 * gap / problem.mu() + 0.5 * problem.Q() * state.w.squaredNorm() +
         0.5 * (state.x + sq * state.w - opt.x).squaredNorm();
}

bool field_norm_bound_check(const HeavyBallState& state, const ConditionedProblem& problem) {
  const HeavyBallState f = vector_field(state, problem);
  const double norm2 = f.w.squaredNorm() + f.x.squaredNorm();
  return norm2 <= 25.0 * lyapunov(state, problem);
}

}  // namespace rkopt
