#include "rkopt/objectives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rkopt/errors.hpp"

namespace rkopt {

Objective::Objective(double mu, double L, std::optional<Optimum> optimum)
    : mu_(mu), L_(L), optimum_(std::move(optimum)) {
  if (!(mu > 0.0) || !(L >= mu)) throw DomainError("objective constants need L >= mu > 0");
}

const Optimum& Objective::require_optimum() const {
  if (!optimum_) throw CapabilityError(name() + " objective has no known optimum");
  return *optimum_;
}

// ---------------------------------------------------------------------------
// Quadratic

namespace {

double checked_min(const Vector& lambda) {
  if (lambda.size() == 0) throw DomainError("lambda must be non-empty");
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i])) {
      throw DomainError("lambda[" + std::to_string(i) + "] must be positive and finite");
    }
  }
  return lambda.minCoeff();
}

}  // namespace

QuadraticObjective::QuadraticObjective(Vector lambda)
    : Objective(2.0 * checked_min(lambda), 2.0 * lambda.maxCoeff(),
                Optimum{Vector::Zero(lambda.size()), 0.0}),
      lambda_(std::move(lambda)) {}

double QuadraticObjective::value(const Vector& x) const {
  return (lambda_.array() * x.array().square()).sum();
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  return 2.0 * (lambda_.array() * x.array()).matrix();
}

Vector QuadraticObjective::derivative_action(const Vector& x, std::span<const Vector> directions) const {
  if (directions.size() == 1) return 2.0 * (lambda_.array() * directions[0].array()).matrix();
  return Vector::Zero(x.size());
}

ObjectivePtr quadratic(Vector lambda) { return std::make_shared<QuadraticObjective>(std::move(lambda)); }

Vector log_spaced(int d, double lo, double hi) {
  if (d < 1 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("log_spaced needs d >= 1 and 0 < lo <= hi");
  Vector out(d);
  if (d == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < d; ++i) out[i] = std::exp(a + (b - a) * i / (d - 1));
  out[0] = lo;
  out[d - 1] = hi;
  return out;
}

// ---------------------------------------------------------------------------
// Data

void LabeledDataset::validate() const {
  if (size() < 1) throw DomainError("dataset is empty");
  if (labels.size() != features.rows()) throw DomainError("label count does not match feature rows");
  if (!features.allFinite()) throw DomainError("dataset has non-finite features");
  if (certificate.size() != features.cols()) throw DomainError("certificate has wrong dimension");
  for (int i = 0; i < size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0) {
      throw DomainError("label " + std::to_string(i) + " is not +/-1");
    }
    if (!(labels[i] * features.row(i).dot(certificate) > 0.0)) {
      throw DomainError("point " + std::to_string(i) + " violates the separability certificate");
    }
  }
}

LabeledDataset gaussian_mixture_data(int n_per_class, int d, double margin, std::uint64_t seed) {
  if (n_per_class < 1 || d < 1) throw DomainError("need n_per_class >= 1 and d >= 1");
  if (!(margin > 0.0)) throw DomainError("margin must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  LabeledDataset data;
  data.features.resize(2 * n_per_class, d);
  data.labels.resize(2 * n_per_class);
  data.certificate = Vector::Unit(d, 0);
  for (int i = 0; i < 2 * n_per_class; ++i) {
    const double label = (i % 2 == 0) ? 1.0 : -1.0;
    data.labels[i] = label;
    for (int j = 0; j < d; ++j) data.features(i, j) = normal(rng);
    data.features(i, 0) += label * margin;
    // Reflect about the class mean along e1 until the point clears margin/10.
    while (label * data.features(i, 0) < margin / 10.0) {
      data.features(i, 0) = 2.0 * label * margin - data.features(i, 0);
    }
  }
  data.validate();
  return data;
}

void write_dataset(std::ostream& out, const LabeledDataset& data) {
  std::ostringstream line;
  line.precision(17);
  for (int i = 0; i < data.size(); ++i) {
    line.str("");
    line << (data.labels[i] > 0 ? "1" : "-1");
    for (int j = 0; j < data.dimension(); ++j) line << ',' << data.features(i, j);
    out << line.str() << '\n';
  }
}

LabeledDataset read_dataset(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no), "bad number '" + cell + "'");
      }
    }
    if (row.size() < 2) throw ParseError("line " + std::to_string(line_no), "need a label and features");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no), "inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DomainError("dataset is empty");
  LabeledDataset data;
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size()) - 1;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    data.labels[i] = rows[i][0];
    for (int j = 0; j < d; ++j) data.features(i, j) = rows[i][j + 1];
  }
  data.certificate = Vector::Unit(d, 0);
  data.validate();
  return data;
}

// ---------------------------------------------------------------------------
// Logistic

namespace {

// Stable logistic sigmoid.
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

// With s = sigmoid(z) and phi(z) = log(1 + exp(-z)), phi^(k)(z) = s(1-s) r_k(s)
// for k >= 2, where r_2 = 1 and r_{k+1} = (1 - 2s) r_k + s(1 - s) r_k'.
// Coefficients are stored lowest degree first.
using Poly = std::vector<double>;

std::array<Poly, LogisticObjective::kMaxLossDerivative + 1> make_loss_polys() {
  std::array<Poly, LogisticObjective::kMaxLossDerivative + 1> r{};
  r[2] = {1.0};
  for (int k = 2; k < LogisticObjective::kMaxLossDerivative; ++k) {
    const Poly& p = r[k];
    Poly next(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      // (1 - 2s) * c s^i
      next[i] += p[i];
      next[i + 1] -= 2.0 * p[i];
      // (s - s^2) * i c s^(i-1)
      if (i > 0) {
        next[i] += static_cast<double>(i) * p[i];
        next[i + 1] -= static_cast<double>(i) * p[i];
      }
    }
    r[k + 1] = std::move(next);
  }
  return r;
}

double eval_poly(const Poly& p, double s) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
  return acc;
}

// phi^(k)(z) for k >= 1.
double loss_derivative(int k, double z) {
  static const auto polys = make_loss_polys();
  if (k == 1) return -sigmoid(-z);
  const double s = sigmoid(z);
  const double t = sigmoid(-z);
  return s * t * eval_poly(polys[k], s);
}

double smoothness_bound(const LabeledDataset& data, double gamma) {
  const Matrix gram = data.features.transpose() * data.features;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return gamma + 0.25 * eig.eigenvalues().maxCoeff();
}

double checked_gamma(const LabeledDataset& data, double gamma) {
  if (data.size() < 1) throw DomainError("logistic objective needs a non-empty dataset");
  data.validate();
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  return gamma;
}

}  // namespace

LogisticObjective::LogisticObjective(LabeledDataset data, double gamma)
    : Objective(checked_gamma(data, gamma), smoothness_bound(data, gamma), std::nullopt),
      data_(std::move(data)),
      gamma_(gamma) {}

double LogisticObjective::value(const Vector& x) const {
  const Vector margins = data_.labels.cwiseProduct(data_.features * x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) sum += softplus_neg(margins[i]);
  return sum + 0.5 * gamma_ * x.squaredNorm();
}

Vector LogisticObjective::gradient(const Vector& x) const {
  const Vector margins = data_.labels.cwiseProduct(data_.features * x);
  Vector coef(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) coef[i] = -data_.labels[i] * sigmoid(-margins[i]);
  return data_.features.transpose() * coef + gamma_ * x;
}

Vector LogisticObjective::derivative_action(const Vector& x, std::span<const Vector> directions) const {
  const int m = static_cast<int>(directions.size());
  if (m < 1 || m > max_derivative_order()) {
    throw CapabilityError("logistic derivative action supports 1.." + std::to_string(max_derivative_order()) +
                          " directions, got " + std::to_string(m));
  }
  // Each derivative contributes y_i x_i; y_i^(m+1) = +/-1.
  const Vector margins = data_.labels.cwiseProduct(data_.features * x);
  Vector coef(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double sign = ((m + 1) % 2 == 0) ? 1.0 : data_.labels[i];
    coef[i] = sign * loss_derivative(m + 1, margins[i]);
  }
  for (const Vector& u : directions) coef.array() *= (data_.features * u).array();
  Vector out = data_.features.transpose() * coef;
  if (m == 1) out += gamma_ * directions[0];
  return out;
}

ObjectivePtr logistic(LabeledDataset data, double gamma) {
  auto objective = std::make_shared<LogisticObjective>(std::move(data), gamma);
  objective->set_optimum(solve_optimum(*objective));
  return objective;
}

// ---------------------------------------------------------------------------
// Optimum

namespace {

constexpr int kNewtonMaxDimension = 512;

}  // namespace

Optimum solve_optimum(const Objective& objective, const Vector& start, const OptimumOptions& options) {
  const double L = objective.L();
  const double threshold = options.tol * std::max(1.0, L);
  const int d = objective.dimension();
  const bool newton = objective.max_derivative_order() >= 1 && d <= kNewtonMaxDimension;

  Vector x = start;
  Vector g = objective.gradient(x);
  double fx = objective.value(x);
  for (std::int64_t iter = 0; iter < options.max_iterations; ++iter) {
    if (!g.allFinite()) throw NumericError("non-finite gradient while solving for the optimum", x);
    if (g.norm() <= threshold) return Optimum{x, fx};

    Vector step = -g / L;
    if (newton) {
      Matrix hessian(d, d);
      Vector e = Vector::Zero(d);
      for (int j = 0; j < d; ++j) {
        e[j] = 1.0;
        hessian.col(j) = objective.derivative_action(x, std::span<const Vector>(&e, 1));
        e[j] = 0.0;
      }
      Eigen::LDLT<Matrix> ldlt(0.5 * (hessian + hessian.transpose()));
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        Vector direction = -ldlt.solve(g);
        if (direction.allFinite() && direction.dot(g) < 0.0) step = direction;
      }
      // Armijo backtracking. Once the predicted decrease is below the rounding
      // level of f the comparison is noise, so the full step is taken.
      const double slope = g.dot(step);
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
      Vector candidate = x + step;
      if (-slope > noise) {
        double t = 1.0;
        double fc = objective.value(candidate);
        while (!(fc <= fx + 1e-4 * t * slope) && t > 1e-12) {
          t *= 0.5;
          candidate = x + t * step;
          fc = objective.value(candidate);
        }
        if (t <= 1e-12) candidate = x + step;
      }
      x = std::move(candidate);
    } else {
      x += step;
    }
    fx = objective.value(x);
    g = objective.gradient(x);
  }
  if (g.allFinite() && g.norm() <= threshold) return Optimum{x, fx};
  std::ostringstream msg;
  msg << "optimum solver exhausted " << options.max_iterations << " iterations (gradient norm " << g.norm() << ")";
  throw ConvergenceError(msg.str(), g.norm());
}

Optimum solve_optimum(const Objective& objective, const OptimumOptions& options) {
  return solve_optimum(objective, Vector::Zero(objective.dimension()), options);
}

CountingObjective::CountingObjective(ObjectivePtr inner)
    : Objective(inner->mu(), inner->L(), inner->optimum()), inner_(std::move(inner)) {}

Vector CountingObjective::gradient(const Vector& x) const {
  ++calls_;
  return inner_->gradient(x);
}

}  // namespace rkopt
