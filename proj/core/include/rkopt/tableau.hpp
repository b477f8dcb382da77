#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rkopt {

/// Explicit Runge-Kutta method in Butcher form.
///
/// Row i of the coefficient matrix holds a(i, 0..i-1); entries on or above the
/// diagonal are structurally zero. Construction validates explicitness and the
/// consistency condition sum(b) == 1. Instances are immutable.
class ButcherTableau {
 public:
  static constexpr double kConsistencyTolerance = 1e-12;

  ButcherTableau(std::string name, std::vector<std::vector<double>> rows, std::vector<double> b,
                 int claimed_order);

  int stages() const noexcept { return static_cast<int>(b_.size()); }
  int claimed_order() const noexcept { return claimed_order_; }
  const std::string& name() const noexcept { return name_; }

  /// a_ij for 0-based stage indices; zero for j >= i.
  double a(int i, int j) const noexcept { return j < i ? rows_[i][j] : 0.0; }
  std::span<const double> row(int i) const noexcept { return rows_[i]; }
  std::span<const double> b() const noexcept { return b_; }

  /// Node abscissa c_i = sum_j a_ij, computed on demand.
  double c(int i) const noexcept;

  // Coefficients and claimed order; the display name is not part of identity.
  friend bool operator==(const ButcherTableau& lhs, const ButcherTableau& rhs) {
    return lhs.rows_ == rhs.rows_ && lhs.b_ == rhs.b_ && lhs.claimed_order_ == rhs.claimed_order_;
  }

 private:
  std::string name_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> b_;
  int claimed_order_;
};

ButcherTableau euler_tableau();
ButcherTableau midpoint_tableau();
// Kutta's three-stage third-order method.
ButcherTableau kutta3_tableau();
ButcherTableau rk4_classic_tableau();

std::vector<ButcherTableau> builtin_tableaus();

/// Built-in method of the given order (1..4). Throws DomainError otherwise.
ButcherTableau builtin_tableau(int order);

/// Parses the JSON tableau format:
///   {"name": "...", "stages": S, "order": s, "a": [[...], ...], "b": [...]}
/// Row i of "a" may list either the i strictly-lower entries or a full row of
/// length S. "name" is optional.
ButcherTableau parse_tableau(std::string_view text);
ButcherTableau load_tableau_file(const std::filesystem::path& path);

/// Inverse of parse_tableau; doubles are written round-trip exact.
std::string serialize_tableau(const ButcherTableau& tableau);

}  // namespace rkopt
