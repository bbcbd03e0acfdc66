#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "ladapt/numerics.hpp"

namespace ladapt {

// Thrown when an input violates a documented precondition (wrong length,
// non-finite entry, bad parameter).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One round of expert losses, K >= 2 finite entries in arbitrary units.
class LossVector {
 public:
  explicit LossVector(Vector values);
  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

 private:
  Vector values_;
};

// Gradient of the round's loss at the played point, d >= 1 finite entries.
class Gradient {
 public:
  explicit Gradient(Vector values);
  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

 private:
  Vector values_;
};

bool all_finite(const Vector& v);

// A fixed comparator for regret reporting.
class ComparatorSpec {
 public:
  enum class Kind { single_expert, distribution, point };

  static ComparatorSpec single_expert(std::size_t expert, std::size_t experts);
  // rho must be nonnegative and sum to one within 1e-12.
  static ComparatorSpec distribution(Vector rho);
  static ComparatorSpec point(Vector u);

  Kind kind() const { return kind_; }
  std::size_t expert() const { return expert_; }
  // Dense representation: e_k, rho or u.
  const Vector& weights() const { return weights_; }
  std::size_t dimension() const { return static_cast<std::size_t>(weights_.size()); }
  std::string describe() const;

 private:
  ComparatorSpec(Kind kind, std::size_t expert, Vector weights)
      : kind_(kind), expert_(expert), weights_(std::move(weights)) {}

  Kind kind_;
  std::size_t expert_ = 0;
  Vector weights_;
};

}  // namespace ladapt
