#include "ladapt/regret.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ladapt {

namespace {

Vector to_vector(const std::vector<CompensatedSum>& sums) {
  Vector v(static_cast<Eigen::Index>(sums.size()));
  for (std::size_t i = 0; i < sums.size(); ++i) v[static_cast<Eigen::Index>(i)] = sums[i].value();
  return v;
}

}  // namespace

RegretLedger::RegretLedger(LedgerMode mode, std::size_t dimension)
    : mode_(mode), dimension_(dimension) {
  if (dimension == 0) throw InvalidInput("RegretLedger: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(dimension);
  if (mode_ == LedgerMode::experts) {
    regret_.resize(dimension);
    clipped_regret_.resize(dimension);
    variance_.resize(dimension);
    clipped_variance_.resize(dimension);
  } else {
    for (Moments* m : {&raw_, &clipped_}) {
      m->total.resize(dimension);
      m->cross = Vector::Zero(n);
      m->gram = Matrix::Zero(n, n);
    }
  }
}

void RegretLedger::record(const Vector& played, const Vector& observation,
                          double clip_ratio) {
  if (static_cast<std::size_t>(played.size()) != dimension_ ||
      static_cast<std::size_t>(observation.size()) != dimension_) {
    throw InvalidInput(fmt::format("RegretLedger: expected dimension {}, got {} and {}",
                                   dimension_, played.size(), observation.size()));
  }
  ++rounds_;
  if (mode_ == LedgerMode::experts) {
    record_experts(played, observation, clip_ratio);
    return;
  }
  accumulate(raw_, played, observation);
  accumulate(clipped_, played, observation * clip_ratio);
}

void RegretLedger::record_experts(const Vector& played, const Vector& loss,
                                  double clip_ratio) {
  const double mix = played.dot(loss);
  for (std::size_t k = 0; k < dimension_; ++k) {
    const double r = mix - loss[static_cast<Eigen::Index>(k)];
    const double rc = clip_ratio * r;
    regret_[k].add(r);
    clipped_regret_[k].add(rc);
    variance_[k].add(r * r);
    clipped_variance_[k].add(rc * rc);
  }
}

void RegretLedger::accumulate(Moments& m, const Vector& played, const Vector& x) {
  const double inner = played.dot(x);
  m.learner.add(inner);
  m.learner_sq.add(inner * inner);
  for (Eigen::Index i = 0; i < x.size(); ++i) m.total[static_cast<std::size_t>(i)].add(x[i]);
  m.cross += inner * x;
  m.gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
}

RegretSummary RegretLedger::evaluate(const Moments& raw, const Moments& clipped,
                                     const Vector& u) {
  auto one = [&u](const Moments& m, double& regret, double& variance) {
    const Vector total = to_vector(m.total);
    regret = m.learner.value() - u.dot(total);
    const Matrix gram = m.gram.selfadjointView<Eigen::Lower>();
    variance = std::max(0.0, m.learner_sq.value() - 2.0 * u.dot(m.cross) + u.dot(gram * u));
  };
  RegretSummary s;
  one(raw, s.regret, s.variance);
  one(clipped, s.clipped_regret, s.clipped_variance);
  return s;
}

RegretSummary RegretLedger::against(const ComparatorSpec& comparator) const {
  if (rounds_ == 0) throw InvalidInput("RegretLedger: no completed round");
  if (comparator.dimension() != dimension_) {
    throw InvalidInput(fmt::format("RegretLedger: comparator dimension {} != ledger dimension {}",
                                   comparator.dimension(), dimension_));
  }
  const Vector& w = comparator.weights();
  if (mode_ == LedgerMode::linearized) return evaluate(raw_, clipped_, w);

  if (comparator.kind() == ComparatorSpec::Kind::point &&
      (w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-12)) {
    throw InvalidInput("RegretLedger: expert comparators must be distributions");
  }
  // Regret against a mixture is the mixture of per-expert regrets.
  RegretSummary s;
  for (std::size_t k = 0; k < dimension_; ++k) {
    const double rho = w[static_cast<Eigen::Index>(k)];
    if (rho == 0.0) continue;
    s.regret += rho * regret_[k].value();
    s.clipped_regret += rho * clipped_regret_[k].value();
    s.variance += rho * variance_[k].value();
    s.clipped_variance += rho * clipped_variance_[k].value();
  }
  return s;
}

double regret_vs(const RegretLedger& ledger, const ComparatorSpec& comparator) {
  return ledger.against(comparator).regret;
}

}  // namespace ladapt
