#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ladapt/domain.hpp"
#include "ladapt/harness/rng.hpp"
#include "ladapt/numerics.hpp"
#include "ladapt/types.hpp"

namespace ladapt::harness {

enum class EnvironmentKind {
  adversarial_signs,
  scale_jump,
  iid_bernstein_quadratic,
  expert_bernoulli,
  simplex_linear,
};

enum class Setting { experts, oco };

std::string to_string(EnvironmentKind kind);
EnvironmentKind environment_kind_from_string(const std::string& name);

// From `round` on (1-based), every loss is multiplied by `multiplier`.
struct ScaleJump {
  std::size_t round = 1;
  double multiplier = 1.0;
};

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::expert_bernoulli;
  std::size_t dimension = 2;  // experts K or dimension d
  std::size_t horizon = 1000;
  std::vector<ScaleJump> schedule;
  std::uint64_t seed = 1;
  Setting scale_jump_setting = Setting::experts;  // only read for scale-jump

  double best_mean = 0.3;   // expert-bernoulli: loss rate of expert 0
  double bias = 0.2;        // adversarial-signs: drift added to every coordinate
  double mean_norm = 0.5;   // iid-bernstein-quadratic: norm of the target mean
  double noise = 1.0;       // iid-bernstein-quadratic: per-coordinate std dev
  double diameter = 2.0;    // ball domains

  Setting setting() const;
  double multiplier_at(std::size_t round) const;
  double max_multiplier() const;
  // Throws InvalidInput with a description of the first violated rule.
  void validate() const;
};

class ExpertStream {
 public:
  explicit ExpertStream(const EnvironmentSpec& spec);

  std::size_t experts() const { return rates_.size(); }
  LossVector next();
  // Largest possible spread of one round's losses.
  double loss_range() const { return max_multiplier_; }
  const std::vector<double>& rates() const { return rates_; }

 private:
  EnvironmentSpec spec_;
  Rng rng_;
  std::vector<double> rates_;
  double max_multiplier_;
  std::size_t round_ = 0;
};

// A round's convex loss: weight * <v, w> (linear) or
// weight * |w - v|^2 / 2 (quadratic).
struct OcoLoss {
  enum class Kind { linear, quadratic };
  Kind kind = Kind::linear;
  Vector vector;
  double weight = 1.0;

  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;
};

class OcoStream {
 public:
  explicit OcoStream(const EnvironmentSpec& spec);

  std::size_t dimension() const { return spec_.dimension; }
  OcoLoss next();
  // The domain the learner must play in.
  std::shared_ptr<const DomainOracle> domain() const { return domain_; }

 private:
  EnvironmentSpec spec_;
  Rng rng_;
  std::shared_ptr<const DomainOracle> domain_;
  Vector mean_;
  std::size_t round_ = 0;
};

}  // namespace ladapt::harness
