#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles/finite_difference.hpp"
#include "oracles/random_states.hpp"
#include "rkopt/errors.hpp"
#include "rkopt/objectives.hpp"

using namespace rkopt;

namespace {

ObjectivePtr kappa500() { return quadratic(log_spaced(50, 1.0 / 500.0, 1.0)); }

ObjectivePtr default_logistic() { return logistic(gaussian_mixture_data(100, 20, 5.0, 42), 1e-2); }

double power_iteration(const Matrix& M) {
  Vector v = Vector::Ones(M.cols());
  double lambda = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Vector next = M * v;
    lambda = next.norm() / v.norm();
    v = next.normalized();
  }
  return lambda;
}

}  // namespace

TEST(Quadratic, ValueAndGradient) {
  const auto f = quadratic(Vector::Constant(1, 1.0));
  const Vector x = Vector::Constant(1, 2.0);
  EXPECT_DOUBLE_EQ(f->value(x), 4.0);
  EXPECT_DOUBLE_EQ(f->gradient(x)[0], 4.0);
}

TEST(Quadratic, Constants) {
  const auto f = kappa500();
  EXPECT_NEAR(f->L() / f->mu(), 500.0, 1e-9);
  EXPECT_DOUBLE_EQ(f->L(), 2.0);
  EXPECT_EQ(f->gradient(Vector::Zero(50)), Vector::Zero(50));
  ASSERT_TRUE(f->optimum());
  EXPECT_EQ(f->optimum()->f_star, 0.0);
}

TEST(Quadratic, RejectsNonpositiveLambda) {
  EXPECT_THROW(quadratic(Vector::Constant(2, 0.0)), DomainError);
  Vector bad(2);
  bad << 1.0, -1.0;
  EXPECT_THROW(quadratic(bad), DomainError);
}

TEST(Quadratic, DerivativeActions) {
  const Vector lambda = Vector::LinSpaced(3, 1.0, 3.0);
  const auto f = quadratic(lambda);
  const Vector u = Vector::Ones(3);
  const std::vector<Vector> one{u}, two{u, u};
  EXPECT_TRUE(f->derivative_action(Vector::Zero(3), one).isApprox(2.0 * lambda));
  EXPECT_EQ(f->derivative_action(Vector::Zero(3), two), Vector::Zero(3));
}

TEST(MixtureData, OneDimensionalSigns) {
  const auto data = gaussian_mixture_data(1, 1, 10.0, 5);
  ASSERT_EQ(data.size(), 2);
  EXPECT_EQ(data.labels[0] * data.labels[1], -1.0);
  EXPECT_LT(data.features(0, 0) * data.features(1, 0), 0.0);
}

TEST(MixtureData, CertificateAndDeterminism) {
  const auto a = gaussian_mixture_data(100, 20, 5.0, 42);
  const auto b = gaussian_mixture_data(100, 20, 5.0, 42);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NO_THROW(a.validate());
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_GT(a.labels[i] * a.features.row(i).dot(a.certificate), 0.0);
    EXPECT_GE(a.labels[i] * a.features(i, 0), 0.5);
  }
  const auto c = gaussian_mixture_data(100, 20, 5.0, 43);
  EXPECT_NE(a.features, c.features);
}

TEST(MixtureData, RepairsSmallMargins) {
  // A margin this small forces many reflections.
  const auto data = gaussian_mixture_data(200, 3, 0.1, 9);
  for (int i = 0; i < data.size(); ++i) EXPECT_GE(data.labels[i] * data.features(i, 0), 0.01 - 1e-15);
}

TEST(MixtureData, CsvRoundTrip) {
  const auto data = gaussian_mixture_data(5, 3, 2.0, 1);
  std::stringstream io;
  write_dataset(io, data);
  const auto back = read_dataset(io);
  EXPECT_EQ(back.features, data.features);
  EXPECT_EQ(back.labels, data.labels);
  std::stringstream bad("1,0.5\n-1,abc\n");
  EXPECT_THROW(read_dataset(bad), ParseError);
}

TEST(Logistic, ValueAtZero) {
  const auto data = gaussian_mixture_data(10, 4, 3.0, 2);
  const auto f = logistic(data, 0.5);
  EXPECT_NEAR(f->value(Vector::Zero(4)), 20 * std::log(2.0), 1e-12);
}

TEST(Logistic, EmptyDatasetRejected) {
  LabeledDataset empty;
  empty.features = Matrix(0, 2);
  empty.labels = Vector(0);
  empty.certificate = Vector::Unit(2, 0);
  EXPECT_THROW(logistic(empty, 1.0), DomainError);
  EXPECT_THROW(logistic(gaussian_mixture_data(2, 2, 1.0, 1), 0.0), DomainError);
}

TEST(Logistic, ConstantsMatchPowerIteration) {
  const auto data = gaussian_mixture_data(100, 20, 5.0, 42);
  const auto f = logistic(data, 1e-2);
  EXPECT_DOUBLE_EQ(f->mu(), 1e-2);
  const double top = power_iteration(data.features.transpose() * data.features);
  EXPECT_NEAR(f->L(), 1e-2 + top / 4.0, 1e-8 * f->L());
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  const auto f = default_logistic();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const Vector x = oracle::random_point(rng, *f);
    const Vector fd = oracle::gradient_fd([&](const Vector& z) { return f->value(z); }, x);
    const Vector g = f->gradient(x);
    EXPECT_LE((fd - g).norm(), 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST(Logistic, HigherDerivativesMatchFiniteDifferences) {
  const auto f = logistic(gaussian_mixture_data(3, 3, 1.0, 4), 0.3);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    const Vector x = 0.3 * oracle::gaussian(rng, 3);
    const Vector u = oracle::gaussian(rng, 3), v = oracle::gaussian(rng, 3), w = oracle::gaussian(rng, 3);
    const std::vector<Vector> U{u}, UV{u, v}, UVW{u, v, w};
    // Each action is the directional derivative of the previous one.
    const Vector h1 = oracle::directional_fd([&](const Vector& z) { return f->gradient(z); }, x, u, 2e-4);
    EXPECT_LT((f->derivative_action(x, U) - h1).norm(), 1e-8);
    const Vector h2 =
        oracle::directional_fd([&](const Vector& z) { return f->derivative_action(z, U); }, x, v, 2e-4);
    EXPECT_LT((f->derivative_action(x, UV) - h2).norm(), 1e-8);
    const Vector h3 =
        oracle::directional_fd([&](const Vector& z) { return f->derivative_action(z, UV); }, x, w, 2e-4);
    EXPECT_LT((f->derivative_action(x, UVW) - h3).norm(), 1e-8);
  }
}

TEST(Logistic, OverflowSafe) {
  const auto f = default_logistic();
  const Vector far = Vector::Constant(20, 1e4);
  EXPECT_TRUE(std::isfinite(f->value(far)));
  EXPECT_TRUE(f->gradient(far).allFinite());
  EXPECT_TRUE(f->gradient(-far).allFinite());
}

TEST(Logistic, OptimumIsStationary) {
  const auto f = default_logistic();
  const auto& opt = f->require_optimum();
  EXPECT_LE(f->gradient(opt.x).norm(), 1e-9 * std::max(1.0, f->L()));
  EXPECT_DOUBLE_EQ(opt.f_star, f->value(opt.x));
}

TEST(Logistic, LargeRegularizationShrinksOptimum) {
  const auto data = gaussian_mixture_data(10, 3, 2.0, 8);
  const auto f = logistic(data, 1e3);
  double max_row = 0.0;
  for (int i = 0; i < data.size(); ++i) max_row = std::max(max_row, data.features.row(i).norm());
  EXPECT_LE(f->require_optimum().x.norm(), data.size() * max_row / 1e3);
}

TEST(SolveOptimum, SymmetricOneDimensionalData) {
  LabeledDataset data;
  data.features = Matrix(2, 1);
  data.features << 1.5, -1.5;
  data.labels = Vector(2);
  data.labels << 1.0, -1.0;
  data.certificate = Vector::Ones(1);
  const auto f = logistic(data, 0.1);
  const double x = f->require_optimum().x[0];
  // Stationarity: 2 * 1.5 * sigma(-1.5 x) = 0.1 x.
  EXPECT_NEAR(3.0 / (1.0 + std::exp(1.5 * x)), 0.1 * x, 1e-10);
}

TEST(SolveOptimum, QuadraticAndIdempotence) {
  const auto f = kappa500();
  const Optimum opt = solve_optimum(*f, Vector::Ones(50));
  EXPECT_LE(opt.x.norm(), 1e-9);
  const auto g = default_logistic();
  const Optimum again = solve_optimum(*g, g->require_optimum().x);
  EXPECT_EQ(again.x, g->require_optimum().x);
}

TEST(SolveOptimum, NewtonSolvesQuadraticInOneStep) {
  OptimumOptions opts;
  opts.max_iterations = 1;
  const auto opt = solve_optimum(*quadratic(log_spaced(5, 0.001, 1.0)), Vector::Ones(5), opts);
  EXPECT_LT(opt.x.norm(), 1e-12);
}

TEST(SolveOptimum, BudgetExhausted) {
  OptimumOptions opts;
  opts.max_iterations = 2;
  const LogisticObjective f(gaussian_mixture_data(10, 4, 3.0, 2), 0.5);
  try {
    solve_optimum(f, Vector::Zero(4), opts);
    FAIL() << "expected non-convergence";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.grad_norm(), 0.0);
  }
}

TEST(CountingObjective, CountsGradients) {
  auto counted = std::make_shared<CountingObjective>(kappa500());
  counted->gradient(Vector::Ones(50));
  counted->gradient(Vector::Ones(50));
  counted->value(Vector::Ones(50));
  EXPECT_EQ(counted->gradient_calls(), 2);
  counted->reset();
  EXPECT_EQ(counted->gradient_calls(), 0);
}

TEST(Assumptions, SpotChecksOnBothObjectives) {
  std::mt19937_64 rng(13);
  for (const auto& f : {kappa500(), default_logistic()}) {
    const auto& opt = f->require_optimum();
    for (int k = 0; k < 1000; ++k) {
      const Vector x = oracle::random_point(rng, *f);
      const Vector y = oracle::random_point(rng, *f);
      const Vector g = f->gradient(x);
      const double fx = f->value(x);
      const double slack = 1e-8 * std::max(1.0, std::abs(fx));
      EXPECT_GE(opt.f_star + slack, fx + g.dot(opt.x - x) + 0.5 * f->mu() * (x - opt.x).squaredNorm());
      EXPECT_LE((g - f->gradient(y)).norm(), f->L() * (x - y).norm() * (1 + 1e-8));
      EXPECT_LE(g.squaredNorm(), 2 * f->L() * (fx - opt.f_star) * (1 + 1e-8) + 1e-12);
    }
  }
}
