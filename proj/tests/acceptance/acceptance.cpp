// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [N ...]   (no arguments runs every criterion)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/finite_difference.hpp"
#include "oracles/random_states.hpp"
#include "oracles/tree_oracle.hpp"
#include "rkopt/dynamics.hpp"
#include "rkopt/harness/commands.hpp"
#include "rkopt/harness/csv.hpp"
#include "rkopt/integrate.hpp"
#include "rkopt/objectives.hpp"
#include "rkopt/optimizers.hpp"
#include "rkopt/order_conditions.hpp"

using namespace rkopt;
using harness::format_double;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Verdict()> run;
};

ConditionedProblem kappa500() { return ConditionedProblem(quadratic(log_spaced(50, 1.0 / 500.0, 1.0))); }

ConditionedProblem default_logistic() {
  return ConditionedProblem(logistic(gaussian_mixture_data(100, 20, 5.0, 42), 1e-2));
}

Verdict integrator_orders() {
  Vector lambda(2);
  lambda << 0.5, 2.0;
  const ConditionedProblem p(quadratic(lambda));
  const Vector y0 = HeavyBallState::at_rest(Vector::Ones(2)).to_flat();
  Verdict v{true, {}};
  for (const auto& [tab, s] : std::vector<std::pair<ButcherTableau, int>>{
           {euler_tableau(), 1}, {midpoint_tableau(), 2}, {rk4_classic_tableau(), 4}}) {
    const double slope = measured_order(tab, heavy_ball_field(p), y0, 1.0);
    v.passed = v.passed && std::abs(slope - s) <= 0.2;
    v.detail += tab.name() + " slope " + format_double(slope) + "; ";
  }
  return v;
}

Verdict algebraic_order() {
  const auto tab = rk4_classic_tableau();
  const auto four = check_order(tab, 4);
  const auto five = check_order(tab, 5);
  const std::size_t order5 = five.conditions.size() - four.conditions.size();
  Verdict v;
  v.passed = four.passed && four.conditions.size() == 8 && order5 == 9 && !five.violated().empty();
  std::ostringstream d;
  d << "orders 1-4: " << four.conditions.size() << " conditions " << (four.passed ? "hold" : "FAIL")
    << "; order 5: " << five.violated().size() << " of " << order5 << " violated; counts";
  const std::vector<std::size_t> expected{1, 1, 2, 4, 9, 20};
  for (int q = 1; q <= 6; ++q) {
    const std::size_t lib = enumerate_trees(q).size();
    const std::size_t brute = oracle::shapes(q).size();
    v.passed = v.passed && lib == expected[q - 1] && brute == expected[q - 1];
    d << ' ' << lib;
  }
  v.detail = d.str();
  return v;
}

Verdict continuous_contraction() {
  const auto p = kappa500();
  const auto s0 = HeavyBallState::at_rest(Vector::Ones(50));
  const double e0 = lyapunov(s0, p);
  Verdict v{true, {}};
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const Vector y = reference_solve(heavy_ball_field(p), s0.to_flat(), t, 1e-9);
    const double ratio = lyapunov(HeavyBallState::from_flat(y), p) / (e0 * std::exp(-t / 2));
    v.passed = v.passed && ratio <= 1.05;
    v.detail += "t=" + format_double(t) + " E/(E0 e^-t/2)=" + format_double(ratio) + "; ";
  }
  return v;
}

Verdict norm_bound() {
  std::mt19937_64 rng(4);
  Verdict v{true, {}};
  for (const auto& p : {kappa500(), default_logistic()}) {
    int violations = 0;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto s = oracle::random_state(rng, p);
      const auto F = vector_field(s, p);
      const double ratio = (F.w.squaredNorm() + F.x.squaredNorm()) / lyapunov(s, p);
      worst = std::max(worst, ratio);
      if (ratio > 25.0) ++violations;
    }
    v.passed = v.passed && violations == 0;
    v.detail += p.objective().name() + ": " + std::to_string(violations) + " violations, max |F|^2/E " +
                format_double(worst) + "; ";
  }
  return v;
}

Verdict short_horizon() {
  const auto p = kappa500();
  const double h = 1.0 / (10.0 * p.sqrt_Q());
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = oracle::random_state(rng, p);
    const Vector y = reference_solve(heavy_ball_field(p), s.to_flat(), h, 1e-11);
    worst = std::max(worst, lyapunov(HeavyBallState::from_flat(y), p) / lyapunov(s, p));
  }
  return {worst <= 3.0, "100 states, max E(y(h))/E(y0) " + format_double(worst)};
}

Verdict theorem_rate() {
  const auto p = kappa500();
  Verdict v{true, {}};
  for (int s : {1, 2, 4}) {
    const auto cal = calibrate_theorem_constant(p, Vector::Ones(50), builtin_tableau(s), RunLimits{100000000, 1e-9, 1});
    const auto& r = cal.trace.records;
    std::size_t bad = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (!(*r[i].lyapunov <= (1.0 - cal.step_size / 4.0) * *r[i - 1].lyapunov)) ++bad;
    }
    const bool ok = bad == 0 && cal.trace.outcome == Outcome::converged && cal.trace.final().f_gap <= 1e-9;
    v.passed = v.passed && ok;
    v.detail += "s=" + std::to_string(s) + " c=2^" + std::to_string(cal.exponent) + " h=" +
                format_double(cal.step_size) + " steps=" + std::to_string(r.size() - 1) +
                " violations=" + std::to_string(bad) + "; ";
  }
  return v;
}

std::map<std::string, std::int64_t> compare_evals(harness::ExperimentConfig c, std::string& detail) {
  std::ostringstream log;
  const auto runs = harness::cmd_compare(c, log);
  std::map<std::string, std::int64_t> evals;
  for (const auto& r : runs) {
    const auto e = r.trace ? r.trace->evals_to_reach(c.target) : std::nullopt;
    evals[r.name] = e ? *e : -1;
    detail += r.name + "=" + (e ? std::to_string(*e) : std::string("never")) + " (h=" +
              format_double(r.step_size) + ") ";
  }
  return evals;
}

Verdict experiment_quadratic() {
  harness::ExperimentConfig c;
  c.optimizers = {"gd", "nag", "dd-s2", "dd-s4"};
  c.target = 1e-9;
  c.record_every = 100;
  Verdict v;
  auto e = compare_evals(c, v.detail);
  const bool all = e["gd"] > 0 && e["nag"] > 0 && e["dd-s2"] > 0 && e["dd-s4"] > 0;
  v.passed = all && e["dd-s4"] < e["dd-s2"] && e["dd-s2"] < e["gd"] && e["dd-s4"] <= 2 * e["nag"];
  return v;
}

Verdict experiment_logistic() {
  harness::ExperimentConfig c;
  c.objective.kind = harness::ObjectiveKind::logistic;
  c.optimizers = {"gd", "nag", "dd-s4"};
  c.target = 1e-8;
  c.budget = 200000;
  c.record_every = 1000;
  Verdict v;
  auto e = compare_evals(c, v.detail);
  v.passed = e["dd-s4"] > 0 && (e["gd"] < 0 || e["dd-s4"] < e["gd"]);
  return v;
}

Verdict exact_derivatives() {
  Vector lambda(2);
  lambda << 0.5, 2.0;
  const ConditionedProblem p(quadratic(lambda));
  const auto o = heavy_ball_oracle(p);
  HeavyBallState s = HeavyBallState::at_rest(Vector::Ones(2));
  s.w.setConstant(0.3);
  const Vector y0 = s.to_flat();
  const auto flow = [&](double t) { return reference_solve(o.field, y0, t, 1e-13); };
  Verdict v{true, {}};
  for (int q = 1; q <= 3; ++q) {
    const Vector exact = solution_derivative(q, o, y0);
    const double rel = (exact - oracle::time_derivative_fd(q, flow, 0.02)).norm() / exact.norm();
    v.passed = v.passed && rel <= 1e-5;
    v.detail += "q=" + std::to_string(q) + " rel " + format_double(rel) + "; ";
  }
  return v;
}

Verdict assumptions() {
  std::mt19937_64 rng(10);
  Verdict v{true, {}};
  for (const auto& p : {kappa500(), default_logistic()}) {
    const Objective& f = p.objective();
    const auto& opt = f.require_optimum();
    int fails = 0;
    for (int k = 0; k < 1000; ++k) {
      const Vector x = oracle::random_point(rng, f);
      const Vector y = oracle::random_point(rng, f);
      const Vector g = f.gradient(x);
      const double fx = f.value(x);
      const double slack = 1e-8 * std::max(1.0, std::abs(fx));
      const bool qsc = opt.f_star + slack >= fx + g.dot(opt.x - x) + 0.5 * f.mu() * (x - opt.x).squaredNorm();
      const bool smooth = (g - f.gradient(y)).norm() <= f.L() * (x - y).norm() * (1 + 1e-8);
      const bool gap = g.squaredNorm() <= 2 * f.L() * (fx - opt.f_star) * (1 + 1e-8) + 1e-12;
      if (!(qsc && smooth && gap)) ++fails;
    }
    v.passed = v.passed && fails == 0;
    v.detail += f.name() + ": " + std::to_string(fails) + " of 1000 points fail; ";
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "integrator orders (measured slopes 1, 2, 4)", 10, integrator_orders},
      {2, "algebraic order certification of rk4 and tree counts", 1, algebraic_order},
      {3, "continuous Lyapunov contraction on the kappa=500 quadratic", 30, continuous_contraction},
      {4, "field norm bound |F|^2 <= 25 E on both objectives", 5, norm_bound},
      {5, "short-horizon bound E(y(h)) <= 3 E(y0)", 30, short_horizon},
      {6, "per-step rate E_{k+1} <= (1 - h/4) E_k with calibrated c", 60, theorem_rate},
      {7, "quadratic experiment: dd-s4 < dd-s2 < gd, dd-s4 <= 2 nag", 60, experiment_quadratic},
      {8, "logistic experiment: dd-s4 beats gd to 1e-8", 120, experiment_logistic},
      {9, "exact-flow derivatives vs finite differences", 10, exact_derivatives},
      {10, "assumption spot-checks on both objectives", 10, assumptions},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit_s;
    const bool ok = v.passed && in_time;
    if (!ok) ++failures;
    std::printf("%s criterion %d: %s | %s| %.2f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", c.id,
                c.title.c_str(), v.detail.c_str(), secs, c.time_limit_s, in_time ? "" : " TIMEOUT");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
