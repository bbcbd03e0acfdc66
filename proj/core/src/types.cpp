#include "ladapt/types.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ladapt {

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

LossVector::LossVector(Vector values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw InvalidInput(fmt::format("LossVector: need at least 2 experts, got {}",
                                   values_.size()));
  }
  if (!all_finite(values_)) throw InvalidInput("LossVector: non-finite entry");
}

Gradient::Gradient(Vector values) : values_(std::move(values)) {
  if (values_.size() < 1) throw InvalidInput("Gradient: empty vector");
  if (!all_finite(values_)) throw InvalidInput("Gradient: non-finite entry");
}

ComparatorSpec ComparatorSpec::single_expert(std::size_t expert, std::size_t experts) {
  if (expert >= experts) {
    throw InvalidInput(fmt::format("ComparatorSpec: expert {} out of range [0, {})",
                                   expert, experts));
  }
  Vector e = Vector::Zero(static_cast<Eigen::Index>(experts));
  e[static_cast<Eigen::Index>(expert)] = 1.0;
  return ComparatorSpec(Kind::single_expert, expert, std::move(e));
}

ComparatorSpec ComparatorSpec::distribution(Vector rho) {
  if (rho.size() == 0 || !all_finite(rho) || rho.minCoeff() < 0.0) {
    throw InvalidInput("ComparatorSpec: distribution must be finite and nonnegative");
  }
  if (std::abs(rho.sum() - 1.0) > 1e-12) {
    throw InvalidInput(fmt::format("ComparatorSpec: distribution sums to {:.17g}", rho.sum()));
  }
  return ComparatorSpec(Kind::distribution, 0, std::move(rho));
}

ComparatorSpec ComparatorSpec::point(Vector u) {
  if (u.size() == 0 || !all_finite(u)) {
    throw InvalidInput("ComparatorSpec: point must be finite and non-empty");
  }
  return ComparatorSpec(Kind::point, 0, std::move(u));
}

std::string ComparatorSpec::describe() const {
  switch (kind_) {
    case Kind::single_expert:
      return fmt::format("expert {}", expert_);
    case Kind::distribution:
      return "distribution";
    case Kind::point:
      return "point";
  }
  return "unknown";
}

}  // namespace ladapt
