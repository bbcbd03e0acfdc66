#include "ladapt/projection.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ladapt/types.hpp"

namespace ladapt {

NewtonResult newton_root(const ScalarMap& rho, double target, double lower, double upper,
                         const NewtonSettings& settings) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw InvalidInput(fmt::format("newton_root: target must be positive, got {}", target));
  }
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw InvalidInput(fmt::format("newton_root: bad bracket [{}, {}]", lower, upper));
  }
  const double rho_lower = rho(lower).first;
  const double rho_upper = rho(upper).first;
  if (!(rho_lower > target && target > rho_upper)) {
    throw InvalidInput(fmt::format(
        "newton_root: bracket does not straddle the target {}: rho({}) = {}, rho({}) = {}",
        target, lower, rho_lower, upper, rho_upper));
  }

  const double h_target = 1.0 / std::sqrt(target);
  double lo = lower;
  double hi = upper;
  double x = lower;
  double residual = rho_lower - target;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    const auto [value, slope] = rho(x);
    residual = value - target;
    if (std::abs(residual) <= settings.tolerance * target) {
      return NewtonResult{x, it, residual, lo, hi};
    }
    if (residual > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = 0.5 * (lo + hi);
    if (value > 0.0 && slope < 0.0) {
      const double h = 1.0 / std::sqrt(value);
      const double h_slope = -0.5 * slope / (value * std::sqrt(value));
      const double step = x + (h_target - h) / h_slope;
      if (step > lo && step < hi) next = step;
    }
    if (next == x) break;
    x = next;
  }
  throw ProjectionError(
      fmt::format("newton_root: no convergence after {} iterations, bracket [{:.17g}, {:.17g}], "
                  "residual {:.3e}",
                  settings.max_iterations, lo, hi, residual),
      lo, hi, residual, 0.0);
}

BallProjector::BallProjector(double diameter, const Matrix& gram, NewtonSettings settings)
    : diameter_(diameter), settings_(settings) {
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw InvalidInput(fmt::format("BallProjector: diameter must be positive, got {}", diameter));
  }
  if (gram.rows() != gram.cols() || gram.rows() < 1) {
    throw InvalidInput("BallProjector: Gram matrix must be square and nonempty");
  }
  if (!gram.allFinite()) throw InvalidInput("BallProjector: Gram matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw ProjectionError("BallProjector: eigendecomposition failed", 0.0, 0.0, 0.0, 0.0);
  }
  basis_ = solver.eigenvectors();
  // Rounding can leave tiny negative eigenvalues on a PSD matrix.
  eigenvalues_ = solver.eigenvalues().cwiseMax(0.0);
}

Vector BallProjector::apply_inverse_metric(const Vector& x, double eta) const {
  const double base = 1.0 / (diameter_ * diameter_);
  const Vector rotated = basis_.transpose() * x;
  const Vector scaled = rotated.array() / (base + 2.0 * eta * eta * eigenvalues_.array());
  return basis_ * scaled;
}

Vector BallProjector::apply_metric(const Vector& x, double eta) const {
  const double base = 1.0 / (diameter_ * diameter_);
  const Vector rotated = basis_.transpose() * x;
  const Vector scaled = rotated.array() * (base + 2.0 * eta * eta * eigenvalues_.array());
  return basis_ * scaled;
}

std::pair<double, double> BallProjector::rho(const Vector& rotated_v, double eta,
                                             double x) const {
  double value = 0.0;
  double slope = 0.0;
  for (Eigen::Index i = 0; i < rotated_v.size(); ++i) {
    const double denom = x + 2.0 * eta * eta * eigenvalues_[i];
    const double c2 = rotated_v[i] * rotated_v[i];
    value += c2 / (denom * denom);
    slope -= 2.0 * c2 / (denom * denom * denom);
  }
  return {value, slope};
}

BallProjection BallProjector::project(const Vector& unprojected, double eta) const {
  if (unprojected.size() != eigenvalues_.size()) {
    throw InvalidInput(fmt::format("BallProjector: point has dimension {}, expected {}",
                                   unprojected.size(), eigenvalues_.size()));
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidInput(fmt::format("BallProjector: eta must be positive, got {}", eta));
  }
  if (!unprojected.allFinite()) throw InvalidInput("BallProjector: non-finite point");

  const double radius = 0.5 * diameter_;
  if (unprojected.norm() <= radius) return BallProjection{unprojected, false, {}};

  const double base = 1.0 / (diameter_ * diameter_);
  const Vector metric = base + 2.0 * eta * eta * eigenvalues_.array();
  const double condition = metric.maxCoeff() / metric.minCoeff();
  if (!(metric.minCoeff() > 0.0) || !std::isfinite(condition)) {
    throw ProjectionError("BallProjector: metric is not positive definite", 0.0, 0.0, 0.0,
                          condition);
  }

  const Vector rotated_v = (basis_.transpose() * unprojected).cwiseProduct(metric);
  const double target = radius * radius;
  const ScalarMap map = [&](double x) { return rho(rotated_v, eta, x); };

  // At x = 1/D^2 the candidate is the unprojected point itself, which lies
  // outside; rho(x) <= |v|^2/x^2 gives the right end.
  const double lower = base;
  double upper = 4.0 * rotated_v.norm() / diameter_;
  while (map(upper).first >= target) upper *= 2.0;

  NewtonResult solve;
  try {
    solve = newton_root(map, target, lower, upper, settings_);
  } catch (const ProjectionError& e) {
    throw ProjectionError(fmt::format("{} (metric condition {:.3e})", e.what(), condition),
                          e.lower(), e.upper(), e.residual(), condition);
  }

  const Vector rotated_point =
      rotated_v.array() / (solve.root + 2.0 * eta * eta * eigenvalues_.array());
  Vector point = basis_ * rotated_point;
  const double norm = point.norm();
  if (norm > radius) point *= radius / norm;
  return BallProjection{std::move(point), true, solve};
}

BallProjection project_ball(double diameter, const Matrix& gram, const Vector& unprojected,
                            double eta, const NewtonSettings& settings) {
  return BallProjector(diameter, gram, settings).project(unprojected, eta);
}

}  // namespace ladapt
