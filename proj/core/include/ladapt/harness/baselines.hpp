#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "ladapt/domain.hpp"
#include "ladapt/learner.hpp"

namespace ladapt::harness {

// Exponential weights with the fixed rate sqrt(8 ln K / T) / L for losses
// whose per-round spread is at most L.
class Hedge : public ExpertLearner {
 public:
  Hedge(std::size_t experts, std::size_t horizon, double assumed_range, std::string label);

  std::string name() const override { return label_; }
  std::size_t experts() const override { return static_cast<std::size_t>(log_weights_.size()); }
  const Vector& prediction() const override { return prediction_; }
  const Vector& round(const LossVector& loss) override;
  RoundDiagnostics diagnostics() const override { return diagnostics_; }

  double learning_rate() const { return eta_; }
  // ln K / eta + (eta/8) sum_t spread_t^2, valid for any rate.
  double bound() const;

 private:
  double eta_;
  Vector log_weights_;
  Vector prediction_;
  CompensatedSum squared_spread_;
  RoundDiagnostics diagnostics_;
  std::string label_;
};

// Projected gradient descent with eta_t = D / sqrt(2 sum_{s<=t} |g_s|^2).
class OgdAdaNorm : public OcoLearner {
 public:
  explicit OgdAdaNorm(std::shared_ptr<const DomainOracle> domain);

  std::string name() const override { return "ogd-adanorm"; }
  std::size_t dimension() const override { return domain_->dimension(); }
  const Vector& prediction() const override { return prediction_; }
  const Vector& round(const Gradient& gradient) override;
  RoundDiagnostics diagnostics() const override { return diagnostics_; }

  // sqrt(2) D sqrt(sum |g_t|^2)
  double bound() const;

 private:
  std::shared_ptr<const DomainOracle> domain_;
  Vector prediction_;
  CompensatedSum squared_norms_;
  RoundDiagnostics diagnostics_;
};

}  // namespace ladapt::harness
