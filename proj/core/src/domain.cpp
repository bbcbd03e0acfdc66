#include "ladapt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <fmt/format.h>

#include "ladapt/types.hpp"

namespace ladapt {

namespace {

void check_dimension(const DomainOracle& domain, const Vector& u) {
  if (static_cast<std::size_t>(u.size()) != domain.dimension()) {
    throw InvalidInput(fmt::format("{} domain: point has dimension {}, expected {}",
                                   domain.name(), u.size(), domain.dimension()));
  }
  if (!u.allFinite()) throw InvalidInput(fmt::format("{} domain: non-finite point", domain.name()));
}

}  // namespace

double DomainOracle::distance(const Vector& u) const { return (u - project(u)).norm(); }

Vector DomainOracle::distance_subgradient(const Vector& u) const {
  const Vector offset = u - project(u);
  const double norm = offset.norm();
  if (norm == 0.0) return Vector::Zero(u.size());
  return offset / norm;
}

bool DomainOracle::contains(const Vector& u, double tolerance) const {
  return distance(u) <= tolerance;
}

BallDomain::BallDomain(Vector center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 1 || !center_.allFinite()) throw InvalidInput("BallDomain: bad center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput(fmt::format("BallDomain: radius must be positive, got {}", radius));
  }
}

BallDomain BallDomain::centered(std::size_t dimension, double radius) {
  return BallDomain(Vector::Zero(static_cast<Eigen::Index>(dimension)), radius);
}

Vector BallDomain::project(const Vector& u) const {
  check_dimension(*this, u);
  const Vector offset = u - center_;
  const double norm = offset.norm();
  if (norm <= radius_) return u;
  return center_ + offset * (radius_ / norm);
}

BoxDomain::BoxDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1 || lower_.size() != upper_.size()) {
    throw InvalidInput("BoxDomain: bounds must be nonempty and of equal length");
  }
  if (!lower_.allFinite() || !upper_.allFinite() || (upper_.array() < lower_.array()).any()) {
    throw InvalidInput("BoxDomain: need finite bounds with lower <= upper");
  }
  if (diameter() == 0.0) throw InvalidInput("BoxDomain: degenerate box");
}

Vector BoxDomain::project(const Vector& u) const {
  check_dimension(*this, u);
  return u.cwiseMax(lower_).cwiseMin(upper_);
}

SimplexDomain::SimplexDomain(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 2) throw InvalidInput("SimplexDomain: need dimension >= 2");
}

Vector SimplexDomain::project(const Vector& u) const {
  check_dimension(*this, u);
  std::vector<double> sorted(u.data(), u.data() + u.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    running += sorted[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  return (u.array() - theta).cwiseMax(0.0);
}

double SimplexDomain::diameter() const { return std::sqrt(2.0); }

Vector SimplexDomain::enclosing_center() const {
  return Vector::Constant(static_cast<Eigen::Index>(dimension_), 1.0 / static_cast<double>(dimension_));
}

double SimplexDomain::enclosing_radius() const {
  const double d = static_cast<double>(dimension_);
  return std::sqrt((d - 1.0) / d);
}

ReductionStep reduce_to_ball_round(const DomainOracle& domain, const Vector& inner_point,
                                   const Vector& true_gradient) {
  if (true_gradient.size() != inner_point.size()) {
    throw InvalidInput("reduce_to_ball_round: gradient and point dimensions differ");
  }
  const Vector projected = domain.project(inner_point);
  const Vector offset = inner_point - projected;
  const double gap = offset.norm();
  Vector surrogate = 0.5 * true_gradient;
  if (gap > 0.0) surrogate += (0.5 * true_gradient.norm() / gap) * offset;
  return ReductionStep{projected, std::move(surrogate)};
}

BallReduction::BallReduction(std::shared_ptr<const DomainOracle> domain,
                             std::unique_ptr<OcoLearner> inner)
    : domain_(std::move(domain)), inner_(std::move(inner)) {
  if (!domain_ || !inner_) throw InvalidInput("BallReduction: null domain or learner");
  if (inner_->dimension() != domain_->dimension()) {
    throw InvalidInput("BallReduction: learner and domain dimensions differ");
  }
  center_ = domain_->enclosing_center();
  refresh();
}

void BallReduction::refresh() { played_ = domain_->project(inner_point()); }

const Vector& BallReduction::round(const Gradient& gradient) {
  if (gradient.size() != dimension()) {
    throw InvalidInput(fmt::format("BallReduction: expected gradient of dimension {}, got {}",
                                   dimension(), gradient.size()));
  }
  ReductionStep step = reduce_to_ball_round(*domain_, inner_point(), gradient.values());
  surrogate_ = std::move(step.surrogate);
  inner_->round(Gradient(surrogate_));
  refresh();
  return played_;
}

}  // namespace ladapt
