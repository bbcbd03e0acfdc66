#include "ladapt/harness/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "ladapt/squint.hpp"
#include "ladapt/types.hpp"

namespace ladapt::harness {

Hedge::Hedge(std::size_t experts, std::size_t horizon, double assumed_range, std::string label)
    : label_(std::move(label)) {
  if (experts < 2) throw InvalidInput("Hedge: need at least 2 experts");
  if (horizon < 1) throw InvalidInput("Hedge: horizon must be at least 1");
  if (!(assumed_range > 0.0) || !std::isfinite(assumed_range)) {
    throw InvalidInput(fmt::format("Hedge: assumed range must be positive, got {}", assumed_range));
  }
  const double K = static_cast<double>(experts);
  eta_ = std::sqrt(8.0 * std::log(K) / static_cast<double>(horizon)) / assumed_range;
  log_weights_ = Vector::Zero(static_cast<Eigen::Index>(experts));
  prediction_ = Vector::Constant(log_weights_.size(), 1.0 / K);
}

const Vector& Hedge::round(const LossVector& loss) {
  if (loss.size() != experts()) {
    throw InvalidInput(fmt::format("Hedge: expected {} losses, got {}", experts(), loss.size()));
  }
  const Vector& l = loss.values();
  const double spread = l.maxCoeff() - l.minCoeff();
  squared_spread_.add(spread * spread);
  diagnostics_.magnitude = instantaneous_regret(prediction_, l).cwiseAbs().maxCoeff();
  diagnostics_.running_max = std::max(diagnostics_.running_max, diagnostics_.magnitude);

  log_weights_ -= eta_ * (l.array() - l.minCoeff()).matrix();
  std::vector<double> lw(log_weights_.data(), log_weights_.data() + log_weights_.size());
  const double normalizer = log_sum_exp(lw);
  prediction_ = (log_weights_.array() - normalizer).exp();
  prediction_ /= prediction_.sum();
  return prediction_;
}

double Hedge::bound() const {
  const double K = static_cast<double>(experts());
  return std::log(K) / eta_ + eta_ / 8.0 * squared_spread_.value();
}

OgdAdaNorm::OgdAdaNorm(std::shared_ptr<const DomainOracle> domain) : domain_(std::move(domain)) {
  if (!domain_) throw InvalidInput("OgdAdaNorm: null domain");
  prediction_ = domain_->project(domain_->enclosing_center());
}

const Vector& OgdAdaNorm::round(const Gradient& gradient) {
  if (gradient.size() != dimension()) {
    throw InvalidInput(fmt::format("OgdAdaNorm: expected gradient of dimension {}, got {}",
                                   dimension(), gradient.size()));
  }
  const Vector& g = gradient.values();
  squared_norms_.add(g.squaredNorm());
  diagnostics_.magnitude = domain_->diameter() * g.norm();
  diagnostics_.running_max = std::max(diagnostics_.running_max, diagnostics_.magnitude);
  const double total = squared_norms_.value();
  if (total > 0.0) {
    const double eta = domain_->diameter() / std::sqrt(2.0 * total);
    prediction_ = domain_->project(prediction_ - eta * g);
  }
  return prediction_;
}

double OgdAdaNorm::bound() const {
  return std::sqrt(2.0) * domain_->diameter() * std::sqrt(squared_norms_.value());
}

}  // namespace ladapt::harness
