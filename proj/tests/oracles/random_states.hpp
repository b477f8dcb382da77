#pragma once

#include <cmath>
#include <random>

#include "rkopt/dynamics.hpp"

namespace oracle {

using rkopt::Vector;

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline Vector gaussian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

/// x scattered around x* over several decades of distance, w over several decades of speed.
inline rkopt::HeavyBallState random_state(std::mt19937_64& rng, const rkopt::ConditionedProblem& p) {
  const auto& opt = p.objective().require_optimum();
  rkopt::HeavyBallState s;
  s.x = opt.x + log_uniform(rng, 1e-2, 10.0) * gaussian(rng, p.dimension());
  s.w = log_uniform(rng, 1e-3, 1.0) * gaussian(rng, p.dimension());
  return s;
}

inline Vector random_point(std::mt19937_64& rng, const rkopt::Objective& f) {
  return f.require_optimum().x + log_uniform(rng, 1e-2, 10.0) * gaussian(rng, f.dimension());
}

}  // namespace oracle
