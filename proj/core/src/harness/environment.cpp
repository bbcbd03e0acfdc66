#include "ladapt/harness/environment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ladapt::harness {

namespace {

struct KindName {
  EnvironmentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {EnvironmentKind::adversarial_signs, "adversarial-signs"},
    {EnvironmentKind::scale_jump, "scale-jump"},
    {EnvironmentKind::iid_bernstein_quadratic, "iid-bernstein-quadratic"},
    {EnvironmentKind::expert_bernoulli, "expert-bernoulli"},
    {EnvironmentKind::simplex_linear, "simplex-linear"},
};

}  // namespace

std::string to_string(EnvironmentKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

EnvironmentKind environment_kind_from_string(const std::string& name) {
  for (const auto& entry : kKindNames) {
    if (name == entry.name) return entry.kind;
  }
  throw InvalidInput(fmt::format("unknown environment kind '{}'", name));
}

Setting EnvironmentSpec::setting() const {
  switch (kind) {
    case EnvironmentKind::expert_bernoulli:
      return Setting::experts;
    case EnvironmentKind::scale_jump:
      return scale_jump_setting;
    default:
      return Setting::oco;
  }
}

double EnvironmentSpec::multiplier_at(std::size_t round) const {
  double m = 1.0;
  std::size_t latest = 0;
  for (const ScaleJump& jump : schedule) {
    if (jump.round <= round && jump.round >= latest) {
      latest = jump.round;
      m = jump.multiplier;
    }
  }
  return m;
}

double EnvironmentSpec::max_multiplier() const {
  double m = multiplier_at(1);
  for (const ScaleJump& jump : schedule) {
    if (jump.round <= horizon) m = std::max(m, jump.multiplier);
  }
  return m;
}

void EnvironmentSpec::validate() const {
  if (horizon < 1) throw InvalidInput("environment: horizon must be at least 1");
  for (const ScaleJump& jump : schedule) {
    if (jump.round < 1) throw InvalidInput("environment: schedule rounds are 1-based");
    if (!(jump.multiplier > 0.0) || !std::isfinite(jump.multiplier)) {
      throw InvalidInput(fmt::format("environment: multiplier at round {} must be positive, got {}",
                                     jump.round, jump.multiplier));
    }
  }
  if (kind == EnvironmentKind::scale_jump && schedule.empty()) {
    throw InvalidInput("environment: scale-jump needs a nonempty schedule");
  }
  if (setting() == Setting::experts && dimension < 2) {
    throw InvalidInput("environment: expert streams need at least 2 experts");
  }
  if (dimension < 1) throw InvalidInput("environment: dimension must be at least 1");
  if (kind == EnvironmentKind::simplex_linear && dimension < 2) {
    throw InvalidInput("environment: simplex-linear needs dimension >= 2");
  }
  if (!(best_mean >= 0.0 && best_mean <= 1.0)) {
    throw InvalidInput("environment: best_mean must lie in [0, 1]");
  }
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw InvalidInput("environment: diameter must be positive");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise) || !std::isfinite(mean_norm) ||
      !std::isfinite(bias)) {
    throw InvalidInput("environment: noise, mean_norm and bias must be finite (noise >= 0)");
  }
}

ExpertStream::ExpertStream(const EnvironmentSpec& spec)
    : spec_(spec), rng_(spec.seed), max_multiplier_(spec.max_multiplier()) {
  spec_.validate();
  if (spec_.setting() != Setting::experts) {
    throw InvalidInput(fmt::format("environment '{}' does not produce expert losses",
                                   to_string(spec_.kind)));
  }
  rates_.resize(spec_.dimension);
  rates_[0] = spec_.best_mean;
  for (std::size_t k = 1; k < rates_.size(); ++k) rates_[k] = rng_.uniform(0.4, 0.6);
}

LossVector ExpertStream::next() {
  ++round_;
  const double m = spec_.multiplier_at(round_);
  Vector loss(static_cast<Eigen::Index>(rates_.size()));
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    loss[static_cast<Eigen::Index>(k)] = rng_.bernoulli(rates_[k]) ? m : 0.0;
  }
  return LossVector(std::move(loss));
}

double OcoLoss::value(const Vector& w) const {
  if (kind == Kind::linear) return weight * vector.dot(w);
  return 0.5 * weight * (w - vector).squaredNorm();
}

Vector OcoLoss::gradient(const Vector& w) const {
  if (kind == Kind::linear) return weight * vector;
  return weight * (w - vector);
}

OcoStream::OcoStream(const EnvironmentSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec_.validate();
  if (spec_.setting() != Setting::oco) {
    throw InvalidInput(fmt::format("environment '{}' does not produce convex losses",
                                   to_string(spec_.kind)));
  }
  const auto d = static_cast<Eigen::Index>(spec_.dimension);
  if (spec_.kind == EnvironmentKind::simplex_linear) {
    domain_ = std::make_shared<SimplexDomain>(spec_.dimension);
  } else {
    domain_ = std::make_shared<BallDomain>(BallDomain::centered(spec_.dimension, 0.5 * spec_.diameter));
  }
  mean_ = Vector::Constant(d, spec_.mean_norm / std::sqrt(static_cast<double>(d)));
}

OcoLoss OcoStream::next() {
  ++round_;
  const double m = spec_.multiplier_at(round_);
  const auto d = static_cast<Eigen::Index>(spec_.dimension);
  const double root_d = std::sqrt(static_cast<double>(d));
  OcoLoss loss;
  loss.weight = m;
  loss.vector.resize(d);
  switch (spec_.kind) {
    case EnvironmentKind::iid_bernstein_quadratic:
      loss.kind = OcoLoss::Kind::quadratic;
      for (Eigen::Index i = 0; i < d; ++i) loss.vector[i] = mean_[i] + spec_.noise * rng_.normal();
      break;
    case EnvironmentKind::simplex_linear:
      // Coordinate 0 is cheaper on average.
      loss.vector[0] = rng_.uniform(0.0, 0.7);
      for (Eigen::Index i = 1; i < d; ++i) loss.vector[i] = rng_.uniform();
      break;
    default:
      for (Eigen::Index i = 0; i < d; ++i) loss.vector[i] = (rng_.sign() + spec_.bias) / root_d;
      break;
  }
  return loss;
}

}  // namespace ladapt::harness
