#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "rkopt/types.hpp"

namespace rkopt {

struct Optimum {
  Vector x;
  double f_star = 0.0;
};

/// Differentiable objective with its quasi-strong-convexity constant mu,
/// smoothness constant L and, when known, its minimiser.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// grad^(m+1) f(x)[u_1, ..., u_m] as a vector, m = directions.size() >= 1.
  /// m == 1 is the Hessian-vector product.
  virtual Vector derivative_action(const Vector& x, std::span<const Vector> directions) const = 0;

  /// Largest m accepted by derivative_action.
  virtual int max_derivative_order() const = 0;

  double mu() const noexcept { return mu_; }
  double L() const noexcept { return L_; }
  const std::optional<Optimum>& optimum() const noexcept { return optimum_; }

  /// x*, or CapabilityError when the optimum is unknown.
  const Optimum& require_optimum() const;

 protected:
  Objective(double mu, double L, std::optional<Optimum> optimum);
  void set_optimum(Optimum optimum) { optimum_ = std::move(optimum); }

 private:
  double mu_;
  double L_;
  std::optional<Optimum> optimum_;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(x) = sum_i lambda_i x_i^2, so mu = 2 min(lambda), L = 2 max(lambda), x* = 0.
/// Throws DomainError for a nonpositive or empty lambda.
ObjectivePtr quadratic(Vector lambda);

/// d values log-spaced over [lo, hi] (inclusive).
Vector log_spaced(int d, double lo, double hi);

/// Feature rows with labels in {-1, +1}. certificate separates every point:
/// labels(i) * <features.row(i), certificate> > 0.
struct LabeledDataset {
  Matrix features;
  Vector labels;
  Vector certificate;

  int size() const noexcept { return static_cast<int>(features.rows()); }
  int dimension() const noexcept { return static_cast<int>(features.cols()); }

  /// Throws DomainError if any invariant fails.
  void validate() const;
};

/// Two unit-covariance Gaussian clusters at +/- margin * e1, one per label.
/// Points on the wrong side of margin/10 along e1 are reflected about their
/// class mean. Uses std::mt19937_64 seeded with `seed`.
LabeledDataset gaussian_mixture_data(int n_per_class, int d, double margin, std::uint64_t seed);

/// Delimited text: one row per point, label first then features, comma separated,
/// 17 significant digits.
void write_dataset(std::ostream& out, const LabeledDataset& data);
/// The certificate is reset to e1 and validated.
LabeledDataset read_dataset(std::istream& in);

/// f(x) = sum_i log(1 + exp(-y_i <x_i, x>)) + gamma/2 |x|^2, with mu = gamma and
/// L = gamma + lambda_max(X^T X) / 4. The optimum is computed at construction.
ObjectivePtr logistic(LabeledDataset data, double gamma);

struct OptimumOptions {
  double tol = 1e-12;  // stop once |grad f| <= tol * max(1, L)
  std::int64_t max_iterations = 10'000'000;
};

/// Minimises a quasi-strongly convex objective.
///
/// Uses damped Newton with a backtracking line search when the objective
/// supplies Hessian-vector products and is small enough to assemble the
/// Hessian, and gradient descent with step 1/L otherwise. Returns the start
/// point immediately when it already satisfies the stopping test.
/// Throws ConvergenceError when the iteration budget runs out.
Optimum solve_optimum(const Objective& objective, const Vector& start,
                      const OptimumOptions& options = {});
Optimum solve_optimum(const Objective& objective, const OptimumOptions& options = {});

class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(Vector lambda);

  std::string name() const override { return "quadratic"; }
  int dimension() const override { return static_cast<int>(lambda_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector derivative_action(const Vector& x, std::span<const Vector> directions) const override;
  int max_derivative_order() const override { return 64; }

  const Vector& lambda() const noexcept { return lambda_; }

 private:
  Vector lambda_;
};

class LogisticObjective final : public Objective {
 public:
  // Derivatives of the per-sample loss are available up to this order.
  static constexpr int kMaxLossDerivative = 10;

  LogisticObjective(LabeledDataset data, double gamma);

  std::string name() const override { return "logistic"; }
  int dimension() const override { return data_.dimension(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector derivative_action(const Vector& x, std::span<const Vector> directions) const override;
  int max_derivative_order() const override { return kMaxLossDerivative - 1; }

  const LabeledDataset& data() const noexcept { return data_; }
  double gamma() const noexcept { return gamma_; }

 private:
  friend ObjectivePtr logistic(LabeledDataset data, double gamma);

  LabeledDataset data_;
  double gamma_;
};

/// Decorator counting gradient calls; everything else is forwarded.
class CountingObjective final : public Objective {
 public:
  explicit CountingObjective(ObjectivePtr inner);

  std::string name() const override { return inner_->name(); }
  int dimension() const override { return inner_->dimension(); }
  double value(const Vector& x) const override { return inner_->value(x); }
  Vector gradient(const Vector& x) const override;
  Vector derivative_action(const Vector& x, std::span<const Vector> directions) const override {
    return inner_->derivative_action(x, directions);
  }
  int max_derivative_order() const override { return inner_->max_derivative_order(); }

  std::int64_t gradient_calls() const noexcept { return calls_.load(); }
  void reset() noexcept { calls_ = 0; }

 private:
  ObjectivePtr inner_;
  mutable std::atomic<std::int64_t> calls_{0};
};

}  // namespace rkopt
