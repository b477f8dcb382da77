#include <benchmark/benchmark.h>

#include "rkopt/dynamics.hpp"
#include "rkopt/integrate.hpp"
#include "rkopt/objectives.hpp"
#include "rkopt/optimizers.hpp"
#include "rkopt/order_conditions.hpp"
#include "rkopt/rooted_tree.hpp"
#include "rkopt/tableau.hpp"

using namespace rkopt;

namespace {

ObjectivePtr kappa500(int d) { return quadratic(log_spaced(d, 1.0 / 500.0, 1.0)); }

void BM_RkStep(benchmark::State& state) {
  const ConditionedProblem problem(kappa500(static_cast<int>(state.range(0))));
  const VectorField field = heavy_ball_field(problem);
  const auto tableau = rk4_classic_tableau();
  Vector y = Vector::Ones(2 * problem.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(rk_step(tableau, field, y, 1e-3));
}
BENCHMARK(BM_RkStep)->Arg(50)->Arg(1000);

void BM_EnumerateTrees(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_trees(q));
}
BENCHMARK(BM_EnumerateTrees)->DenseRange(4, 8, 2);

void BM_OrderConditions(benchmark::State& state) {
  const auto tableau = rk4_classic_tableau();
  const auto trees = enumerate_trees(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double sum = 0.0;
    for (const auto& t : trees) sum += elementary_weight(tableau, t);
    benchmark::DoNotOptimize(sum);
  }
}
BENCHMARK(BM_OrderConditions)->Arg(4)->Arg(8);

void BM_LogisticGradient(benchmark::State& state) {
  const auto f = logistic(gaussian_mixture_data(100, 20, 5.0, 42), 1e-2);
  const Vector x = Vector::Constant(20, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(f->gradient(x));
}
BENCHMARK(BM_LogisticGradient);

void BM_DirectDiscretizationRun(benchmark::State& state) {
  const ConditionedProblem problem(kappa500(50));
  const auto tableau = rk4_classic_tableau();
  for (auto _ : state) {
    const auto trace = direct_discretization(problem, Vector::Ones(50), tableau, FixedStep{0.1},
                                             RunLimits{1000000, 1e-9, 1000});
    benchmark::DoNotOptimize(trace.records.size());
  }
}
BENCHMARK(BM_DirectDiscretizationRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
