#include "rkopt/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rkopt {

namespace {

bool runaway(const Vector& v) {
  return !v.allFinite() || v.lpNorm<Eigen::Infinity>() > kDivergenceThreshold;
}

}  // namespace

Vector rk_step(const ButcherTableau& tableau, const VectorField& field, const Vector& y, double h,
               const StageObserver& observer) {
  const int stages = tableau.stages();
  std::vector<Vector> slopes;
  slopes.reserve(stages);
  for (int i = 0; i < stages; ++i) {
    Vector g = y;
    auto row = tableau.row(i);
    for (int j = 0; j < i; ++j) {
      if (row[j] != 0.0) g.noalias() += (h * row[j]) * slopes[j];
    }
    if (runaway(g)) {
      throw DivergenceError("stage " + std::to_string(i) + " point is non-finite or exceeds 1e100", i);
    }
    if (observer) observer(i, g);
    slopes.push_back(field(g));
    if (!slopes.back().allFinite()) {
      throw DivergenceError("field value at stage " + std::to_string(i) + " is non-finite", i);
    }
  }
  Vector next = y;
  auto b = tableau.b();
  for (int i = 0; i < stages; ++i) {
    if (b[i] != 0.0) next.noalias() += (h * b[i]) * slopes[i];
  }
  if (runaway(next)) {
    throw DivergenceError("step result is non-finite or exceeds 1e100", stages);
  }
  return next;
}

IntegrationResult integrate_n(const ButcherTableau& tableau, const VectorField& field,
                              const Vector& y0, double h, std::int64_t n) {
  IntegrationResult result;
  Trajectory& traj = result.trajectory;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.field_evals.reserve(n + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(y0);
  traj.field_evals.push_back(0);
  for (std::int64_t k = 1; k <= n; ++k) {
    try {
      traj.states.push_back(rk_step(tableau, field, traj.states.back(), h));
    } catch (const DivergenceError& e) {
      result.error = e;
      break;
    }
    traj.times.push_back(static_cast<double>(k) * h);
    traj.field_evals.push_back(k * tableau.stages());
  }
  return result;
}

Vector integrate_to(const ButcherTableau& tableau, const VectorField& field, const Vector& y0,
                    double t_end, std::int64_t n) {
  const double h = t_end / static_cast<double>(n);
  Vector y = y0;
  for (std::int64_t k = 0; k < n; ++k) y = rk_step(tableau, field, y, h);
  return y;
}

Vector reference_solve(const VectorField& field, const Vector& y0, double t_end,
                       const ReferenceOptions& options) {
  if (!(options.tol >= kMinReferenceTolerance)) {
    throw DomainError("reference tolerance must be >= 1e-13");
  }
  if (t_end == 0.0) return y0;

  // Backward integration runs the reversed field forward.
  VectorField oriented = field;
  double span = t_end;
  if (t_end < 0.0) {
    oriented = [&field](const Vector& y) -> Vector { return -field(y); };
    span = -t_end;
  }

  static const ButcherTableau rk4 = rk4_classic_tableau();
  std::int64_t n = std::max<std::int64_t>(1, options.initial_steps);
  std::optional<Vector> previous;
  double last_diff = std::numeric_limits<double>::infinity();
  for (int halving = 0; halving <= options.max_halvings; ++halving, n *= 2) {
    std::optional<Vector> current;
    try {
      current = integrate_to(rk4, oriented, y0, span, n);
    } catch (const DivergenceError&) {
      // Too coarse to be stable; refine.
    }
    if (current && previous) {
      last_diff = (*current - *previous).lpNorm<Eigen::Infinity>();
      if (last_diff < options.tol) return *current;
    }
    previous = std::move(current);
  }
  throw OracleError("reference solver did not reach tolerance " + std::to_string(options.tol) +
                    " after " + std::to_string(options.max_halvings) +
                    " halvings (last difference " + std::to_string(last_diff) + ")");
}

Vector reference_solve(const VectorField& field, const Vector& y0, double t_end, double tol) {
  ReferenceOptions options;
  options.tol = tol;
  return reference_solve(field, y0, t_end, options);
}

}  // namespace rkopt
