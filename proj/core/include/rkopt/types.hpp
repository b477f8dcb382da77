#pragma once

#include <functional>

#include <Eigen/Core>

namespace rkopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Autonomous vector field y' = F(y).
using VectorField = std::function<Vector(const Vector&)>;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace rkopt
