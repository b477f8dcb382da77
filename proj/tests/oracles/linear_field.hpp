#pragma once

#include "rkopt/order_conditions.hpp"

namespace oracle {

/// Tensor oracle for y' = A y: the first derivative is A, all higher ones vanish.
inline rkopt::TensorOracle linear_oracle(const rkopt::Matrix& A) {
  rkopt::TensorOracle o;
  o.field = [A](const rkopt::Vector& y) -> rkopt::Vector { return A * y; };
  o.derivative = [A](const rkopt::Vector& y, std::span<const rkopt::Vector> dirs) -> rkopt::Vector {
    if (dirs.size() == 1) return A * dirs[0];
    return rkopt::Vector::Zero(y.size());
  };
  o.max_order = 64;
  return o;
}

}  // namespace oracle
