#include "ladapt/squint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace ladapt {

double log_exp_quadratic_integral(double R, double V, double a) {
  if (!std::isfinite(R) || !std::isfinite(V) || !std::isfinite(a) || !(a > 0.0) ||
      V < 0.0) {
    throw InvalidInput(fmt::format(
        "exp_quadratic_integral: need finite R, V >= 0, a > 0 (R={}, V={}, a={})", R, V, a));
  }
  if (V == 0.0) {
    if (R == 0.0) return std::log(a);
    const double x = a * R;
    if (R > 0.0) return x + std::log(-std::expm1(-x)) - std::log(R);
    return std::log(-std::expm1(x)) - std::log(-R);
  }

  const double f_end = a * R - a * a * V;
  const double peak_at = R / (2.0 * V);
  double f_max = std::max(0.0, f_end);
  const double f_min = std::min(0.0, f_end);
  if (peak_at > 0.0 && peak_at < a) f_max = std::max(f_max, R * R / (4.0 * V));

  if (f_max - f_min < 1.0) {
    const GaussLegendreRule& rule = gauss_legendre(16);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double eta = 0.5 * a * (rule.nodes[i] + 1.0);
      total += rule.weights[i] * std::exp(eta * R - eta * eta * V - f_max);
    }
    return f_max + std::log(0.5 * a * total);
  }

  const double s = std::sqrt(V);
  const double z1 = -R / (2.0 * s);
  const double z2 = z1 + s * a;
  const double log_prefactor = 0.5 * std::log(std::numbers::pi) - std::log(2.0 * s);
  if (z1 >= 0.0) {
    // Integrand decreasing on [0, a]; the peak value is 1.
    return log_prefactor + std::log(erfcx(z1) - std::exp(f_end) * erfcx(z2));
  }
  if (z2 <= 0.0) {
    // Integrand increasing; factor out its value at a.
    return f_end + log_prefactor + std::log(erfcx(-z2) - std::exp(-f_end) * erfcx(-z1));
  }
  // Interior maximum exp(R^2/(4V)); the erf sum has no cancellation.
  return z1 * z1 + log_prefactor + std::log(std::erf(z2) + std::erf(-z1));
}

double exp_quadratic_integral(double R, double V, double a) {
  return std::exp(log_exp_quadratic_integral(R, V, a));
}

SquintState::SquintState(Vector prior_in, double initial_scale)
    : prior(std::move(prior_in)),
      scale(initial_scale),
      prediction(prior),
      ledger(LedgerMode::experts, static_cast<std::size_t>(std::max<Eigen::Index>(prior.size(), 1))) {
  if (prior.size() < 2) throw InvalidInput("SquintState: need at least 2 experts");
  if (!all_finite(prior) || prior.minCoeff() <= 0.0) {
    throw InvalidInput("SquintState: prior entries must be positive");
  }
  if (std::abs(prior.sum() - 1.0) > 1e-12) {
    throw InvalidInput(fmt::format("SquintState: prior sums to {:.17g}", prior.sum()));
  }
  clipped_regret.resize(experts());
  clipped_variance.resize(experts());
}

Vector SquintState::clipped_regret_values() const {
  Vector v(prior.size());
  for (std::size_t k = 0; k < experts(); ++k) v[static_cast<Eigen::Index>(k)] = clipped_regret[k].value();
  return v;
}

Vector SquintState::clipped_variance_values() const {
  Vector v(prior.size());
  for (std::size_t k = 0; k < experts(); ++k) v[static_cast<Eigen::Index>(k)] = clipped_variance[k].value();
  return v;
}

Vector squint_weights(const SquintState& state) {
  const double upper = 1.0 / (2.0 * state.scale.current_max());
  const std::size_t K = state.experts();
  std::vector<double> log_weights(K);
  for (std::size_t k = 0; k < K; ++k) {
    log_weights[k] = std::log(state.prior[static_cast<Eigen::Index>(k)]) +
                     log_exp_quadratic_integral(state.clipped_regret[k].value(),
                                                state.clipped_variance[k].value(), upper);
  }
  const double normalizer = log_sum_exp(log_weights);
  Vector p(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    p[static_cast<Eigen::Index>(k)] = std::exp(log_weights[k] - normalizer);
  }
  return p / p.sum();
}

Vector instantaneous_regret(const Vector& p, const Vector& loss) {
  // Shifting by the smallest loss leaves r unchanged and makes ties exact.
  const Vector shifted = loss.array() - loss.minCoeff();
  return Vector::Constant(p.size(), p.dot(shifted)) - shifted;
}

const Vector& squint_round(SquintState& state, const LossVector& loss) {
  if (loss.size() != state.experts()) {
    throw InvalidInput(fmt::format("squint_round: expected {} losses, got {}",
                                   state.experts(), loss.size()));
  }
  const Vector& p = state.prediction;
  const Vector r = instantaneous_regret(p, loss.values());
  state.scale.observe(r.cwiseAbs().maxCoeff());
  const double ratio = state.scale.clip_ratio();

  state.ledger.record(p, loss.values(), ratio);
  for (std::size_t k = 0; k < state.experts(); ++k) {
    const double rc = ratio * r[static_cast<Eigen::Index>(k)];
    state.clipped_regret[k].add(rc);
    state.clipped_variance[k].add(rc * rc);
  }
  ++state.rounds;
  state.prediction = squint_weights(state);
  return state.prediction;
}

double squint_potential(const SquintState& state) {
  if (state.rounds == 0) return 0.0;
  const double upper = 1.0 / (2.0 * state.scale.previous_max());
  CompensatedSum total;
  for (std::size_t k = 0; k < state.experts(); ++k) {
    const double R = state.clipped_regret[k].value();
    const double V = state.clipped_variance[k].value();
    if (R == 0.0 && V == 0.0) continue;
    auto integrand = [R, V](double eta) {
      if (eta == 0.0) return R;
      return std::expm1(eta * R - eta * eta * V) / eta;
    };
    const QuadratureResult q = integrate_adaptive(integrand, 0.0, upper, 1e-12, 1e-13);
    total.add(state.prior[static_cast<Eigen::Index>(k)] * q.value);
  }
  return total.value();
}

SquintC::SquintC(Vector prior, double initial_scale, bool track_potential)
    : state_(std::move(prior), initial_scale), track_potential_(track_potential) {}

SquintC SquintC::uniform(std::size_t experts, double initial_scale, bool track_potential) {
  if (experts < 2) throw InvalidInput("SquintC: need at least 2 experts");
  return SquintC(Vector::Constant(static_cast<Eigen::Index>(experts), 1.0 / static_cast<double>(experts)),
                 initial_scale, track_potential);
}

const Vector& SquintC::round(const LossVector& loss) { return squint_round(state_, loss); }

RoundDiagnostics SquintC::diagnostics() const {
  RoundDiagnostics d;
  d.magnitude = state_.scale.last_observed();
  d.running_max = state_.scale.current_max();
  d.clip_ratio = state_.scale.clip_ratio();
  if (track_potential_) d.potential = squint_potential(state_);
  return d;
}

}  // namespace ladapt
