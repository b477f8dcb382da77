#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rkopt/errors.hpp"
#include "rkopt/tableau.hpp"
#include "rkopt/types.hpp"

namespace rkopt {

/// States whose max-norm exceeds this are treated as divergent.
inline constexpr double kDivergenceThreshold = 1e100;

/// Samples of a fixed-step integration: iterate k sits at times[k] and has
/// consumed field_evals[k] field evaluations in total.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<std::int64_t> field_evals;

  std::size_t size() const noexcept { return states.size(); }
  const Vector& back() const { return states.back(); }
};

/// Optional sink for stage points g_1..g_S of each step.
using StageObserver = std::function<void(int stage, const Vector& point)>;

/// One explicit Runge-Kutta step: exactly tableau.stages() field evaluations.
/// Throws DivergenceError on a non-finite or runaway stage value.
Vector rk_step(const ButcherTableau& tableau, const VectorField& field, const Vector& y, double h,
               const StageObserver& observer = {});

struct IntegrationResult {
  Trajectory trajectory;
  // Set when a step diverged; trajectory then holds the iterates before it.
  std::optional<DivergenceError> error;
};

/// n fixed steps of size h, recording every iterate.
IntegrationResult integrate_n(const ButcherTableau& tableau, const VectorField& field,
                              const Vector& y0, double h, std::int64_t n);

/// Final state after n fixed steps, without storing the trajectory.
/// Throws DivergenceError.
Vector integrate_to(const ButcherTableau& tableau, const VectorField& field, const Vector& y0,
                    double t_end, std::int64_t n);

struct ReferenceOptions {
  double tol = 1e-12;
  int max_halvings = 22;
  std::int64_t initial_steps = 1;
};

inline constexpr double kMinReferenceTolerance = 1e-13;

/// High-accuracy truth oracle: classical RK4 with step halving until two
/// successive answers agree within tol in max-norm; returns the finer one.
/// Negative t_end integrates backwards in time.
/// Throws OracleError when the halving budget runs out.
Vector reference_solve(const VectorField& field, const Vector& y0, double t_end,
                       const ReferenceOptions& options);
Vector reference_solve(const VectorField& field, const Vector& y0, double t_end, double tol);

}  // namespace rkopt
