#include "rkopt/harness/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "rkopt/dynamics.hpp"
#include "rkopt/harness/config.hpp"
#include "rkopt/harness/csv.hpp"
#include "rkopt/integrate.hpp"
#include "rkopt/order_conditions.hpp"

namespace rkopt::harness {

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Fixture {
  std::string label;
  ObjectivePtr objective;
  Vector x0;
};

Fixture kappa500() {
  return {"quadratic kappa=500", quadratic(log_spaced(50, 1.0 / 500.0, 1.0)), Vector::Ones(50)};
}

Fixture default_logistic() {
  ObjectivePtr f = logistic(gaussian_mixture_data(100, 20, 5.0, 42), 1e-2);
  return {"logistic N=200 d=20", f, Vector::Zero(20)};
}

// Two-dimensional linear heavy-ball system.
Fixture small_quadratic() {
  Vector lambda(2);
  lambda << 0.5, 2.0;
  return {"quadratic d=2", quadratic(lambda), Vector::Ones(2)};
}

// Small logistic problem: nonlinear field with a moderate condition number.
Fixture small_logistic() {
  ObjectivePtr f = logistic(gaussian_mixture_data(2, 2, 1.0, 7), 1.0);
  return {"logistic N=4 d=2", f, Vector::Ones(2)};
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

Vector gaussian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

HeavyBallState random_state(std::mt19937_64& rng, const ConditionedProblem& problem) {
  const Optimum& opt = problem.objective().require_optimum();
  const int d = problem.dimension();
  HeavyBallState s;
  s.x = opt.x + log_uniform(rng, 1e-2, 10.0) * gaussian(rng, d);
  s.w = log_uniform(rng, 1e-3, 1.0) * gaussian(rng, d);
  return s;
}

Vector random_point(std::mt19937_64& rng, const Objective& f) {
  return f.require_optimum().x + log_uniform(rng, 1e-2, 10.0) * gaussian(rng, f.dimension());
}

std::string fmt(double v) { return format_double(v); }

CheckResult make(std::string suite, std::string name, std::string property, double margin,
                 std::string detail = {}) {
  return {std::move(suite), std::move(name), std::move(property), margin >= 0.0, margin, std::move(detail)};
}

// ---------------------------------------------------------------------------

void order_suite(std::vector<CheckResult>& out) {
  {
    const std::array<std::size_t, 8> expected{1, 1, 2, 4, 9, 20, 48, 115};
    double margin = 0.0;
    std::ostringstream detail;
    for (int q = 1; q <= 8; ++q) {
      const std::size_t n = enumerate_trees(q).size();
      detail << (q > 1 ? "," : "") << n;
      if (n != expected[q - 1]) margin = -1.0;
    }
    out.push_back(make("order", "rooted tree counts q=1..8", "#trees = 1,1,2,4,9,20,48,115", margin,
                       "got " + detail.str()));
  }

  const Fixture linear = small_quadratic();
  const ConditionedProblem linear_problem(linear.objective);
  const Vector linear_y0 = HeavyBallState::at_rest(linear.x0).to_flat();

  const Fixture nonlinear = small_logistic();
  const ConditionedProblem nonlinear_problem(nonlinear.objective);
  const Vector nonlinear_y0 = HeavyBallState::at_rest(nonlinear.x0).to_flat();

  for (const auto& tableau : builtin_tableaus()) {
    const int s = tableau.claimed_order();
    {
      const OrderCheck at = check_order(tableau, s);
      const OrderCheck above = check_order(tableau, s + 1);
      const double margin = (at.passed && !above.passed) ? 0.0 : -1.0;
      out.push_back(make("order", "algebraic order " + tableau.name(),
                         "Phi(t) = 1/gamma(t) for all |t| <= s, violated at s+1", margin,
                         std::to_string(above.violated().size()) + " order-" + std::to_string(s + 1) +
                             " conditions violated"));
    }
    {
      const double slope = measured_order(tableau, heavy_ball_field(linear_problem), linear_y0, 1.0);
      out.push_back(make("order", "empirical order " + tableau.name() + " (" + linear.label + ")",
                         "|slope - s| <= 0.2", 0.2 - std::abs(slope - s), "slope " + fmt(slope)));
    }
    {
      const double slope = measured_order(tableau, heavy_ball_field(nonlinear_problem), nonlinear_y0, 1.0);
      const int certified = certified_order(tableau);
      const double margin = (std::lround(slope) == certified) ? 0.5 - std::abs(slope - certified) : -1.0;
      out.push_back(make("order", "order agreement " + tableau.name() + " (" + nonlinear.label + ")",
                         "round(measured slope) = certified order", margin,
                         "slope " + fmt(slope) + ", certified " + std::to_string(certified)));
    }
  }
}

void lyapunov_suite(std::vector<CheckResult>& out) {
  const std::array<double, 5> times{0.5, 1.0, 2.0, 5.0, 10.0};
  for (const Fixture& fx : {kappa500(), default_logistic()}) {
    const ConditionedProblem problem(fx.objective);
    const HeavyBallState start = HeavyBallState::at_rest(fx.x0);
    const double e0 = lyapunov(start, problem);
    const VectorField field = heavy_ball_field(problem);
    double margin = std::numeric_limits<double>::infinity();
    std::ostringstream detail;
    for (double t : times) {
      const Vector y = reference_solve(field, start.to_flat(), t, 1e-9);
      const double e = lyapunov(HeavyBallState::from_flat(y), problem);
      const double bound = 1.05 * e0 * std::exp(-t / 2.0);
      margin = std::min(margin, (bound - e) / e0);
      detail << "E(" << t << ")/E0=" << fmt(e / e0) << ' ';
    }
    out.push_back(make("lyapunov", "continuous contraction (" + fx.label + ")",
                       "E(y(t)) <= 1.05 E(y0) exp(-t/2)", margin, detail.str()));
  }

  const Fixture fx = kappa500();
  const ConditionedProblem problem(fx.objective);
  const VectorField field = heavy_ball_field(problem);
  const double h = 1.0 / (10.0 * problem.sqrt_Q());
  std::mt19937_64 rng(kSeed);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const HeavyBallState s = random_state(rng, problem);
    const double e0 = lyapunov(s, problem);
    const Vector y = reference_solve(field, s.to_flat(), h, 1e-11);
    margin = std::min(margin, (3.0 * e0 - lyapunov(HeavyBallState::from_flat(y), problem)) / e0);
  }
  out.push_back(make("lyapunov", "short-horizon bound (" + fx.label + ", 100 states)",
                     "E(y(h)) <= 3 E(y0) for h = 1/(10 sqrt Q)", margin));
}

// Fourth-order central stencils for the first three derivatives.
Vector central_difference(int q, const std::function<Vector(double)>& y, double delta) {
  switch (q) {
    case 1:
      return (-y(2 * delta) + 8 * y(delta) - 8 * y(-delta) + y(-2 * delta)) / (12 * delta);
    case 2:
      return (-y(2 * delta) + 16 * y(delta) - 30 * y(0) + 16 * y(-delta) - y(-2 * delta)) /
             (12 * delta * delta);
    case 3:
      return (-y(3 * delta) + 8 * y(2 * delta) - 13 * y(delta) + 13 * y(-delta) - 8 * y(-2 * delta) +
              y(-3 * delta)) /
             (8 * delta * delta * delta);
    default:
      throw DomainError("stencil available for q <= 3");
  }
}

void lemmas_suite(std::vector<CheckResult>& out) {
  std::mt19937_64 rng(kSeed + 1);
  for (const Fixture& fx : {kappa500(), default_logistic()}) {
    const ConditionedProblem problem(fx.objective);
    double margin = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
      const HeavyBallState s = random_state(rng, problem);
      const HeavyBallState f = vector_field(s, problem);
      const double lhs = f.w.squaredNorm() + f.x.squaredNorm();
      const double rhs = 25.0 * lyapunov(s, problem);
      margin = std::min(margin, (rhs - lhs) / rhs);
      if (!field_norm_bound_check(s, problem)) ++violations;
    }
    out.push_back(make("lemmas", "field norm bound (" + fx.label + ", 1000 states)", "|F(y)|^2 <= 25 E(y)",
                       violations == 0 ? margin : -1.0, std::to_string(violations) + " violations"));
  }

  for (const Fixture& fx : {small_quadratic(), small_logistic()}) {
    const ConditionedProblem problem(fx.objective);
    const TensorOracle oracle = heavy_ball_oracle(problem);
    HeavyBallState s = HeavyBallState::at_rest(fx.x0);
    s.w.setConstant(0.3);
    const Vector y0 = s.to_flat();
    const std::function<Vector(double)> traj = [&](double t) {
      return reference_solve(oracle.field, y0, t, 1e-13);
    };
    double worst = 0.0;
    std::ostringstream detail;
    for (int q = 1; q <= 3; ++q) {
      const Vector exact = solution_derivative(q, oracle, y0);
      const Vector fd = central_difference(q, traj, 0.02);
      const double rel = (exact - fd).norm() / exact.norm();
      worst = std::max(worst, rel);
      detail << "q=" << q << " rel=" << fmt(rel) << ' ';
    }
    out.push_back(make("lemmas", "exact-flow derivatives (" + fx.label + ")",
                       "sum alpha(t) F(t)(y) matches finite differences within 1e-5", 1e-5 - worst,
                       detail.str()));
  }
}

void assumptions_suite(std::vector<CheckResult>& out) {
  std::mt19937_64 rng(kSeed + 2);
  for (const Fixture& fx : {kappa500(), default_logistic()}) {
    const Objective& f = *fx.objective;
    const Optimum& opt = f.require_optimum();
    const double mu = f.mu();
    const double L = f.L();
    double qsc = std::numeric_limits<double>::infinity();
    double smooth = qsc;
    double grad_gap = qsc;
    double fd = qsc;
    for (int i = 0; i < 1000; ++i) {
      const Vector x = random_point(rng, f);
      const Vector g = f.gradient(x);
      const double fx_val = f.value(x);
      const double rhs = fx_val + g.dot(opt.x - x) + 0.5 * mu * (x - opt.x).squaredNorm();
      qsc = std::min(qsc, (opt.f_star - rhs + 1e-8 * std::max(1.0, std::abs(fx_val))));

      const Vector y = random_point(rng, f);
      const double lhs = (g - f.gradient(y)).norm();
      smooth = std::min(smooth, L * (x - y).norm() * (1.0 + 1e-8) - lhs);

      const double gap = fx_val - opt.f_star;
      grad_gap = std::min(grad_gap, 2.0 * L * gap * (1.0 + 1e-8) + 1e-12 - g.squaredNorm());

      if (i < 20) {
        Vector num(f.dimension());
        for (int j = 0; j < f.dimension(); ++j) {
          const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
          Vector xp = x;
          Vector xm = x;
          xp[j] += step;
          xm[j] -= step;
          num[j] = (f.value(xp) - f.value(xm)) / (2 * step);
        }
        fd = std::min(fd, 1e-6 * std::max(1.0, g.norm()) - (num - g).norm());
      }
    }
    out.push_back(make("assumptions", "quasi-strong convexity (" + fx.label + ")",
                       "f* >= f(x) + <grad f(x), x* - x> + mu/2 |x - x*|^2", qsc));
    out.push_back(make("assumptions", "L-smoothness (" + fx.label + ")",
                       "|grad f(x) - grad f(y)| <= L |x - y|", smooth));
    out.push_back(make("assumptions", "gradient-gap inequality (" + fx.label + ")",
                       "|grad f(x)|^2 <= 2 L (f(x) - f*)", grad_gap));
    out.push_back(make("assumptions", "gradient vs finite differences (" + fx.label + ")",
                       "|grad f - central FD| <= 1e-6 max(1, |grad f|)", fd));
  }
}

}  // namespace

std::vector<CheckResult> run_verify_suite(std::string_view suite) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (!all && suite != "order" && suite != "lyapunov" && suite != "lemmas" && suite != "assumptions") {
    throw ConfigError("verify: unknown suite '" + std::string(suite) +
                      "' (expected order, lyapunov, lemmas, assumptions or all)");
  }
  if (all || suite == "order") order_suite(out);
  if (all || suite == "lyapunov") lyapunov_suite(out);
  if (all || suite == "lemmas") lemmas_suite(out);
  if (all || suite == "assumptions") assumptions_suite(out);
  return out;
}

bool print_verify_report(std::ostream& out, const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    out << (c.passed ? "PASS " : "FAIL ") << '[' << c.suite << "] " << c.name << " :: " << c.property
        << " :: margin " << format_double(c.margin);
    if (!c.detail.empty()) out << " :: " << c.detail;
    out << '\n';
  }
  out << (ok ? "all checks passed" : "verification FAILED") << " (" << checks.size() << " checks)\n";
  return ok;
}

}  // namespace rkopt::harness
