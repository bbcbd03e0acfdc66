#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "ladapt/numerics.hpp"

namespace ladapt {

struct NewtonSettings {
  double tolerance = 1e-12;  // relative to the target
  int max_iterations = 50;
};

struct NewtonResult {
  double root = 0.0;
  int iterations = 0;
  double residual = 0.0;  // rho(root) - target
  double lower = 0.0;     // final bracket
  double upper = 0.0;
};

// Raised when the projection cannot be computed: a metric that is not
// positive definite, or a root solve that runs out of iterations.
class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(const std::string& what, double lower, double upper, double residual,
                  double condition)
      : std::runtime_error(what),
        lower_(lower),
        upper_(upper),
        residual_(residual),
        condition_(condition) {}

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double residual() const { return residual_; }
  // Ratio of the largest to the smallest metric eigenvalue.
  double condition() const { return condition_; }

 private:
  double lower_, upper_, residual_, condition_;
};

// Value and derivative of a decreasing convex map.
using ScalarMap = std::function<std::pair<double, double>(double)>;

// Solves rho(x) = target on [lower, upper], where rho(lower) > target >
// rho(upper). Newton steps are taken on rho^{-1/2}, which is increasing and
// for sums of inverse squares concave, so iterates started at the left end
// approach the root from the left; any step leaving the bracket is replaced
// by bisection. Stops once |rho(x) - target| <= tolerance * target.
// Throws InvalidInput for an invalid bracket and ProjectionError when the
// iteration budget runs out.
NewtonResult newton_root(const ScalarMap& rho, double target, double lower, double upper,
                         const NewtonSettings& settings = {});

struct BallProjection {
  Vector point;
  bool projected = false;  // false when the input was already in the ball
  NewtonResult solve;
};

// Projection onto the centered ball of radius D/2 under the metric
// I/D^2 + 2 eta^2 G, for a PSD matrix G (a slave's clipped Gram matrix
// accumulated since it woke up).
//
// G is diagonalized once at construction; the projector can then be
// queried for any eta and also applies the metric's inverse, so a slave's
// update needs one eigendecomposition per round.
class BallProjector {
 public:
  BallProjector(double diameter, const Matrix& gram, NewtonSettings settings = {});

  double diameter() const { return diameter_; }
  std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  // Columns are eigenvectors: G = basis diag(eigenvalues) basis^T.
  const Matrix& basis() const { return basis_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const NewtonSettings& settings() const { return settings_; }

  // (I/D^2 + 2 eta^2 G)^{-1} x
  Vector apply_inverse_metric(const Vector& x, double eta) const;
  // (I/D^2 + 2 eta^2 G) x
  Vector apply_metric(const Vector& x, double eta) const;

  // rho(x) = sum_i c_i^2 / (x + 2 eta^2 lambda_i)^2 with c = basis^T v and
  // v the metric applied to the unprojected point.
  std::pair<double, double> rho(const Vector& rotated_v, double eta, double x) const;

  BallProjection project(const Vector& unprojected, double eta) const;

 private:
  double diameter_;
  Matrix basis_;
  Vector eigenvalues_;
  NewtonSettings settings_;
};

// Convenience wrapper: builds the projector for a single query.
BallProjection project_ball(double diameter, const Matrix& gram, const Vector& unprojected,
                            double eta, const NewtonSettings& settings = {});

}  // namespace ladapt
