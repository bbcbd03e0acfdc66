#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "ladapt/learner.hpp"
#include "ladapt/numerics.hpp"

namespace ladapt {

// A bounded convex set accessed through its Euclidean projection.
class DomainOracle {
 public:
  virtual ~DomainOracle() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual Vector project(const Vector& u) const = 0;
  // Largest distance between two points of the set.
  virtual double diameter() const = 0;
  // Smallest ball containing the set.
  virtual Vector enclosing_center() const = 0;
  virtual double enclosing_radius() const = 0;

  double distance(const Vector& u) const;
  // (u - P(u))/|u - P(u)| outside the set, 0 inside.
  Vector distance_subgradient(const Vector& u) const;
  bool contains(const Vector& u, double tolerance = 1e-10) const;
};

class BallDomain : public DomainOracle {
 public:
  BallDomain(Vector center, double radius);
  static BallDomain centered(std::size_t dimension, double radius);

  std::string name() const override { return "ball"; }
  std::size_t dimension() const override { return static_cast<std::size_t>(center_.size()); }
  Vector project(const Vector& u) const override;
  double diameter() const override { return 2.0 * radius_; }
  Vector enclosing_center() const override { return center_; }
  double enclosing_radius() const override { return radius_; }

 private:
  Vector center_;
  double radius_;
};

class BoxDomain : public DomainOracle {
 public:
  BoxDomain(Vector lower, Vector upper);

  std::string name() const override { return "box"; }
  std::size_t dimension() const override { return static_cast<std::size_t>(lower_.size()); }
  Vector project(const Vector& u) const override;
  double diameter() const override { return (upper_ - lower_).norm(); }
  Vector enclosing_center() const override { return 0.5 * (lower_ + upper_); }
  double enclosing_radius() const override { return 0.5 * diameter(); }

 private:
  Vector lower_;
  Vector upper_;
};

// Probability simplex in R^d. Its diameter is sqrt(2), but the smallest
// enclosing ball, centered at the barycenter, has radius sqrt((d-1)/d).
class SimplexDomain : public DomainOracle {
 public:
  explicit SimplexDomain(std::size_t dimension);

  std::string name() const override { return "simplex"; }
  std::size_t dimension() const override { return dimension_; }
  Vector project(const Vector& u) const override;
  double diameter() const override;
  Vector enclosing_center() const override;
  double enclosing_radius() const override;

 private:
  std::size_t dimension_;
};

struct ReductionStep {
  Vector played;     // w = P_U(u-hat)
  Vector surrogate;  // g = (g_true + |g_true| s) / 2
};

// One round of the reduction: given the inner learner's point u-hat (in
// absolute coordinates) and the true gradient at the played point, returns
// the played point and the surrogate gradient for the inner learner.
ReductionStep reduce_to_ball_round(const DomainOracle& domain, const Vector& inner_point,
                                   const Vector& true_gradient);

// Runs a ball learner on the smallest ball enclosing an arbitrary domain.
// The inner learner works in coordinates centered at the enclosing center
// and must be configured with diameter 2 * enclosing_radius().
class BallReduction : public OcoLearner {
 public:
  BallReduction(std::shared_ptr<const DomainOracle> domain, std::unique_ptr<OcoLearner> inner);

  std::string name() const override { return inner_->name() + "-reduced"; }
  std::size_t dimension() const override { return domain_->dimension(); }
  // The played point w_t.
  const Vector& prediction() const override { return played_; }
  const Vector& round(const Gradient& gradient) override;
  RoundDiagnostics diagnostics() const override { return inner_->diagnostics(); }

  const DomainOracle& domain() const { return *domain_; }
  const OcoLearner& inner() const { return *inner_; }
  // Inner prediction in absolute coordinates.
  Vector inner_point() const { return center_ + inner_->prediction(); }
  const Vector& last_surrogate() const { return surrogate_; }

 private:
  void refresh();

  std::shared_ptr<const DomainOracle> domain_;
  std::unique_ptr<OcoLearner> inner_;
  Vector center_;
  Vector played_;
  Vector surrogate_;
};

}  // namespace ladapt
