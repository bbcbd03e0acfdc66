#include "ladapt/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "ladapt/harness/baselines.hpp"
#include "ladapt/harness/bounds.hpp"
#include "ladapt/metagrad.hpp"
#include "ladapt/squint.hpp"

namespace ladapt::harness {

namespace {

struct AlgorithmName {
  AlgorithmKind kind;
  const char* name;
};

constexpr AlgorithmName kAlgorithmNames[] = {
    {AlgorithmKind::squint_c, "squint+c"},
    {AlgorithmKind::squint_l, "squint+l"},
    {AlgorithmKind::hedge, "hedge"},
    {AlgorithmKind::metagrad_c, "metagrad+c"},
    {AlgorithmKind::metagrad_l, "metagrad+l"},
    {AlgorithmKind::metagrad_c_reduced, "metagrad+c-reduced"},
    {AlgorithmKind::metagrad_l_reduced, "metagrad+l-reduced"},
    {AlgorithmKind::ogd_adanorm, "ogd-adanorm"},
};

constexpr std::size_t kMaxReportedViolations = 20;

bool is_reduced(AlgorithmKind kind) {
  return kind == AlgorithmKind::metagrad_c_reduced || kind == AlgorithmKind::metagrad_l_reduced;
}

// The MetaGrad+C state doing the work inside any of the MetaGrad learners.
const MetaGradState* metagrad_state(const OcoLearner& learner) {
  if (const auto* c = dynamic_cast<const MetaGradC*>(&learner)) return &c->state();
  if (const auto* l = dynamic_cast<const MetaGradL*>(&learner)) {
    return l->inner() ? &l->inner()->state() : nullptr;
  }
  if (const auto* r = dynamic_cast<const BallReduction*>(&learner)) return metagrad_state(r->inner());
  return nullptr;
}

const MetaGradL* metagrad_l(const OcoLearner& learner) {
  if (const auto* l = dynamic_cast<const MetaGradL*>(&learner)) return l;
  if (const auto* r = dynamic_cast<const BallReduction*>(&learner)) return metagrad_l(r->inner());
  return nullptr;
}

const SquintState* squint_state(const ExpertLearner& learner) {
  if (const auto* c = dynamic_cast<const SquintC*>(&learner)) return &c->state();
  if (const auto* l = dynamic_cast<const SquintL*>(&learner)) {
    return l->inner() ? &l->inner()->state() : nullptr;
  }
  return nullptr;
}

class Verifier {
 public:
  explicit Verifier(ExperimentSummary& summary) : summary_(summary) {}

  void check(bool ok, std::size_t round, const std::string& what) {
    ++summary_.invariant_checks;
    if (ok) return;
    ++summary_.invariant_violation_count;
    if (summary_.invariant_violations.size() < kMaxReportedViolations) {
      summary_.invariant_violations.push_back(fmt::format("round {}: {}", round, what));
    }
  }

  void squint(const SquintState& s, std::size_t round) {
    const double potential = squint_potential(s);
    const double limit = std::log(s.scale.previous_max() / s.scale.initial_scale());
    check(potential <= limit + 1e-9, round,
          fmt::format("squint potential {:.17g} exceeds ln(B_(T-1)/B) = {:.17g}", potential, limit));
    clipping(s.ledger, s.scale, round, [&](std::size_t k) {
      return ComparatorSpec::single_expert(k, s.experts());
    }, s.experts());
  }

  void metagrad(const MetaGradState& s, std::size_t round) {
    const double potential = metagrad_potential(s);
    check(potential <= 1.0 + 1e-9, round,
          fmt::format("metagrad potential {:.17g} exceeds 1", potential));
    const auto limit = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(s.rounds + 1))));
    check(s.active.size() <= limit, round,
          fmt::format("{} active slaves, more than floor(log2 {}) = {}", s.active.size(),
                      s.rounds + 1, limit));
    check(s.prediction.norm() <= 0.5 * s.diameter + 1e-10, round,
          fmt::format("master prediction norm {:.17g} outside the ball", s.prediction.norm()));
    const auto d = static_cast<Eigen::Index>(s.dimension);
    clipping(s.ledger, s.scale, round, [&](std::size_t j) {
      Vector u = Vector::Zero(d);
      if (j > 0) u[static_cast<Eigen::Index>((j - 1) / 2)] = (j % 2 == 1 ? 0.5 : -0.5) * s.diameter;
      return ComparatorSpec::point(u);
    }, 2 * s.dimension + 1);
  }

 private:
  template <class Make>
  void clipping(const RegretLedger& ledger, const ScaleTracker& scale, std::size_t round,
                Make make, std::size_t count) {
    if (ledger.rounds() == 0) return;
    const double limit = scale.current_max() - scale.initial_scale();
    for (std::size_t j = 0; j < count; ++j) {
      const ComparatorSpec comparator = make(j);
      const RegretSummary r = ledger.against(comparator);
      const double gap = r.regret - r.clipped_regret;
      check(gap <= limit + 1e-9 * std::max(1.0, scale.current_max()), round,
            fmt::format("R - Rbar = {:.17g} exceeds B_T - B_0 = {:.17g} for {}", gap, limit,
                        comparator.describe()));
    }
  }

  ExperimentSummary& summary_;
};

std::unique_ptr<ExpertLearner> make_expert_learner(const ExperimentConfig& config,
                                                   const ExpertStream& stream) {
  const std::size_t K = stream.experts();
  const AlgorithmSpec& a = config.algorithm;
  switch (a.kind) {
    case AlgorithmKind::squint_c:
      return std::make_unique<SquintC>(SquintC::uniform(K, a.initial_scale, config.track_potential));
    case AlgorithmKind::squint_l:
      return std::make_unique<SquintL>(SquintL::uniform(K, config.track_potential));
    case AlgorithmKind::hedge:
      return std::make_unique<Hedge>(K, config.environment.horizon,
                                     stream.loss_range() * a.range_scale,
                                     a.range_scale == 1.0 ? "hedge-oracle" : "hedge-mistuned");
    default:
      throw InvalidInput(fmt::format("{} is not an expert algorithm", to_string(a.kind)));
  }
}

std::unique_ptr<OcoLearner> make_oco_learner(const ExperimentConfig& config,
                                             const std::shared_ptr<const DomainOracle>& domain) {
  const AlgorithmSpec& a = config.algorithm;
  const std::size_t d = domain->dimension();
  const double enclosing = 2.0 * domain->enclosing_radius();
  switch (a.kind) {
    case AlgorithmKind::metagrad_c:
      return std::make_unique<MetaGradC>(d, domain->diameter(), a.initial_scale);
    case AlgorithmKind::metagrad_l:
      return std::make_unique<MetaGradL>(d, domain->diameter());
    case AlgorithmKind::metagrad_c_reduced:
      return std::make_unique<BallReduction>(
          domain, std::make_unique<MetaGradC>(d, enclosing, a.initial_scale));
    case AlgorithmKind::metagrad_l_reduced:
      return std::make_unique<BallReduction>(domain, std::make_unique<MetaGradL>(d, enclosing));
    case AlgorithmKind::ogd_adanorm:
      return std::make_unique<OgdAdaNorm>(domain);
    default:
      throw InvalidInput(fmt::format("{} is not a convex-loss algorithm", to_string(a.kind)));
  }
}

RoundRecord record_from(std::size_t t, const RoundDiagnostics& d) {
  RoundRecord r;
  r.t = t;
  r.magnitude = d.magnitude;
  r.running_max = d.running_max;
  r.active_slaves = d.active_slaves;
  r.potential = d.potential;
  r.restart = d.restarted;
  return r;
}

void run_experts(ExperimentTrace& trace, bool verify) {
  const ExperimentConfig& config = trace.config;
  ExpertStream stream(config.environment);
  auto learner = make_expert_learner(config, stream);
  trace.algorithm_name = learner->name();
  trace.prior = Vector::Constant(static_cast<Eigen::Index>(stream.experts()),
                                 1.0 / static_cast<double>(stream.experts()));
  Verifier verifier(trace.summary);

  for (std::size_t t = 1; t <= config.environment.horizon; ++t) {
    double ratio_before = 0.0;
    if (const auto* c = dynamic_cast<const SquintC*>(learner.get())) {
      ratio_before = c->state().scale.sum_ratio();
    }
    const Vector played = learner->prediction();
    const LossVector loss = stream.next();
    learner->round(loss);
    const RoundDiagnostics diag = learner->diagnostics();

    BoundInputs in;
    double clip = 1.0;
    if (const auto* c = dynamic_cast<const SquintC*>(learner.get())) {
      const ScaleTracker& s = c->state().scale;
      in.initial_scale = s.initial_scale();
      in.previous_max = s.previous_max();
      in.current_max = s.current_max();
      in.ratio_sum_before = ratio_before;
      clip = s.clip_ratio();
    } else if (const auto* l = dynamic_cast<const SquintL*>(learner.get())) {
      const RestartSupervisor& sup = l->supervisor();
      in.current_max = sup.global().current_max();
      in.ratio_sum_before = sup.ratio_sum_before();
      clip = sup.global().clip_ratio();
    } else if (const auto* h = dynamic_cast<const Hedge*>(learner.get())) {
      in.direct_bound = h->bound();
    }

    trace.rows.push_back(record_from(t, diag));
    trace.played.push_back(played);
    trace.observations.push_back(loss.values());
    trace.clip_ratios.push_back(clip);
    trace.learner_losses.push_back(played.dot(loss.values()));
    trace.bound_inputs.push_back(in);
    if (diag.restarted) {
      const auto& events = dynamic_cast<const SquintL&>(*learner).supervisor().restarts();
      trace.summary.restart_events.push_back(events.back());
    }

    if (verify) {
      if (const SquintState* s = squint_state(*learner)) verifier.squint(*s, t);
      const double total = learner->prediction().sum();
      verifier.check(std::abs(total - 1.0) <= 1e-12 && learner->prediction().minCoeff() >= 0.0, t,
                     fmt::format("prediction is not a distribution (sum {:.17g})", total));
    }
  }
}

void run_oco(ExperimentTrace& trace, bool verify) {
  const ExperimentConfig& config = trace.config;
  OcoStream stream(config.environment);
  trace.domain = stream.domain();
  auto learner = make_oco_learner(config, trace.domain);
  trace.algorithm_name = learner->name();
  const auto* reduction = dynamic_cast<const BallReduction*>(learner.get());
  Verifier verifier(trace.summary);

  for (std::size_t t = 1; t <= config.environment.horizon; ++t) {
    const Vector played = learner->prediction();
    OcoLoss loss = stream.next();
    const Vector g = loss.gradient(played);
    Vector inner_point;
    if (reduction) inner_point = reduction->inner().prediction();
    learner->round(Gradient(g));
    const RoundDiagnostics diag = learner->diagnostics();

    BoundInputs in;
    double clip = 1.0;
    if (const MetaGradL* l = metagrad_l(*learner)) {
      const RestartSupervisor& sup = l->supervisor();
      in.current_max = sup.global().current_max();
      in.squared_ratio_sum = sup.squared_ratio_sum();
      in.squared_cumulative_ratio_sum = sup.squared_cumulative_ratio_sum();
      clip = sup.global().clip_ratio();
    } else if (const MetaGradState* s = metagrad_state(*learner)) {
      in.initial_scale = s->scale.initial_scale();
      in.previous_max = s->scale.previous_max();
      in.current_max = s->scale.current_max();
      in.squared_sum_before = s->squared_magnitudes_before;
      in.squared_sum = s->squared_magnitudes.value();
      clip = s->scale.clip_ratio();
    } else if (const auto* o = dynamic_cast<const OgdAdaNorm*>(learner.get())) {
      in.direct_bound = o->bound();
    }

    trace.rows.push_back(record_from(t, diag));
    trace.played.push_back(played);
    trace.observations.push_back(g);
    trace.clip_ratios.push_back(clip);
    trace.learner_losses.push_back(loss.value(played));
    trace.losses.push_back(std::move(loss));
    trace.bound_inputs.push_back(in);
    if (reduction) {
      trace.inner_points.push_back(std::move(inner_point));
      trace.inner_gradients.push_back(reduction->last_surrogate());
    }
    if (diag.restarted) {
      trace.summary.restart_events.push_back(metagrad_l(*learner)->supervisor().restarts().back());
    }
    if (const MetaGradState* s = metagrad_state(*learner)) {
      trace.summary.max_newton_iterations =
          std::max(trace.summary.max_newton_iterations, s->max_newton_iterations);
    }

    if (verify) {
      if (const MetaGradState* s = metagrad_state(*learner)) verifier.metagrad(*s, t);
      verifier.check(trace.domain->contains(learner->prediction(), 1e-9), t,
                     "played point outside the domain");
    }
  }
}

BoundValue bound_at(AlgorithmKind kind, const BoundInputs& in, const RegretSummary& s,
                    const RegretSummary* inner, std::size_t dim, double kl) {
  BoundValue b;
  switch (kind) {
    case AlgorithmKind::squint_c:
      b = squint_c_bound(s.clipped_variance, kl, in.initial_scale, in.previous_max,
                         in.current_max, in.ratio_sum_before);
      break;
    case AlgorithmKind::squint_l:
      b = squint_l_bound(s.variance, kl, in.ratio_sum_before, in.current_max);
      break;
    case AlgorithmKind::metagrad_c:
      b = metagrad_c_bound(s.clipped_variance, dim, in.squared_sum_before, in.previous_max,
                           in.squared_sum, in.initial_scale, in.current_max);
      b.value += in.current_max;
      break;
    case AlgorithmKind::metagrad_l:
      b = metagrad_l_bound(s.variance, dim, in.squared_ratio_sum,
                           in.squared_cumulative_ratio_sum, in.current_max);
      break;
    case AlgorithmKind::metagrad_c_reduced:
      b = reduction_bound(s.variance, dim, in.squared_sum_before, in.previous_max,
                          in.squared_sum, in.initial_scale, in.current_max);
      break;
    case AlgorithmKind::metagrad_l_reduced:
      b = metagrad_l_bound(inner->variance, dim, in.squared_ratio_sum,
                           in.squared_cumulative_ratio_sum, in.current_max);
      b.value *= 2.0;
      break;
    case AlgorithmKind::hedge:
    case AlgorithmKind::ogd_adanorm:
      b.value = in.direct_bound;
      break;
  }
  return b;
}

// Replays the trace against one comparator, calling visit(i, summary, bound)
// after every round.
template <class Visit>
void replay_bounds(const ExperimentTrace& trace, const ComparatorSpec& comparator, Visit visit) {
  const AlgorithmKind kind = trace.config.algorithm.kind;
  const bool experts = trace.setting == Setting::experts;
  const std::size_t dim =
      experts ? static_cast<std::size_t>(trace.prior.size()) : trace.domain->dimension();
  RegretLedger ledger(experts ? LedgerMode::experts : LedgerMode::linearized, dim);
  RegretLedger inner_ledger(LedgerMode::linearized, dim);
  double kl = 0.0;
  std::optional<ComparatorSpec> inner_comparator;
  if (experts) {
    kl = kl_divergence(comparator.weights(), trace.prior);
  } else if (is_reduced(kind)) {
    inner_comparator =
        ComparatorSpec::point(comparator.weights() - trace.domain->enclosing_center());
  }
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    ledger.record(trace.played[i], trace.observations[i], trace.clip_ratios[i]);
    const RegretSummary s = ledger.against(comparator);
    RegretSummary inner;
    if (inner_comparator) {
      inner_ledger.record(trace.inner_points[i], trace.inner_gradients[i], 1.0);
      inner = inner_ledger.against(*inner_comparator);
    }
    visit(i, s, bound_at(kind, trace.bound_inputs[i], s, &inner, dim, kl));
  }
}

// Fills per-row regret, bound and slack against the final comparator.
void finalize(ExperimentTrace& trace) {
  const ExperimentConfig& config = trace.config;
  const std::size_t T = trace.rows.size();
  trace.comparator = compute_offline_comparator(trace);

  ExperimentSummary& summary = trace.summary;
  replay_bounds(trace, trace.comparator,
                [&](std::size_t i, const RegretSummary& s, const BoundValue& b) {
    RoundRecord& row = trace.rows[i];
    row.regret_best = s.regret;
    row.bound = b.value;
    row.slack = b.value - s.regret;
    summary.bound_clamped = summary.bound_clamped || b.clamped;
    summary.min_slack = summary.min_slack ? std::min(*summary.min_slack, *row.slack) : *row.slack;
    if (*row.slack < -config.slack_tolerance * std::max(1.0, std::abs(b.value))) {
      ++summary.bound_violations;
    }
  });

  CompensatedSum learner_total;
  for (double l : trace.learner_losses) learner_total.add(l);
  summary.comparator = trace.comparator.describe();
  summary.regret = learner_total.value() - comparator_loss(trace, trace.comparator);
  if (T > 0) {
    summary.pseudo_regret = *trace.rows.back().regret_best;
    summary.bound = trace.rows.back().bound;
    summary.slack = trace.rows.back().slack;
  }
  summary.restarts = summary.restart_events.size();

  for (std::size_t c : config.checkpoints) {
    const ComparatorSpec best = compute_offline_comparator(trace, c);
    CompensatedSum prefix;
    for (std::size_t i = 0; i < c; ++i) prefix.add(trace.learner_losses[i]);
    summary.checkpoints.push_back(CheckpointRegret{c, prefix.value() - comparator_loss(trace, best, c)});
  }
}

}  // namespace

std::string to_string(AlgorithmKind kind) {
  for (const auto& entry : kAlgorithmNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

AlgorithmKind algorithm_kind_from_string(const std::string& name) {
  for (const auto& entry : kAlgorithmNames) {
    if (name == entry.name) return entry.kind;
  }
  throw InvalidInput(fmt::format("unknown algorithm '{}'", name));
}

Setting setting_of(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::squint_c:
    case AlgorithmKind::squint_l:
    case AlgorithmKind::hedge:
      return Setting::experts;
    default:
      return Setting::oco;
  }
}

void ExperimentConfig::validate() const {
  environment.validate();
  const AlgorithmKind kind = algorithm.kind;
  if (setting_of(kind) != environment.setting()) {
    throw InvalidInput(fmt::format("algorithm {} cannot run on the {} environment ({} losses)",
                                   to_string(kind), to_string(environment.kind),
                                   environment.setting() == Setting::experts ? "expert" : "convex"));
  }
  if (environment.kind == EnvironmentKind::simplex_linear &&
      (kind == AlgorithmKind::metagrad_c || kind == AlgorithmKind::metagrad_l)) {
    throw InvalidInput(fmt::format(
        "{} only plays on a centered ball; use {}-reduced on simplex-linear", to_string(kind),
        to_string(kind)));
  }
  if (!(algorithm.initial_scale > 0.0) || !std::isfinite(algorithm.initial_scale)) {
    throw InvalidInput("algorithm: initial_scale must be positive");
  }
  if (!(algorithm.range_scale > 0.0) || !std::isfinite(algorithm.range_scale)) {
    throw InvalidInput("algorithm: range_scale must be positive");
  }
  for (std::size_t c : checkpoints) {
    if (c < 1 || c > environment.horizon) {
      throw InvalidInput(fmt::format("checkpoint {} outside [1, {}]", c, environment.horizon));
    }
  }
  if (!(slack_tolerance >= 0.0)) throw InvalidInput("slack_tolerance must be nonnegative");
}

ExperimentTrace run_experiment(const ExperimentConfig& config, bool verify) {
  config.validate();
  ExperimentTrace trace;
  trace.config = config;
  trace.setting = config.environment.setting();
  const auto start = std::chrono::steady_clock::now();
  if (trace.setting == Setting::experts) {
    run_experts(trace, verify);
  } else {
    run_oco(trace, verify);
  }
  finalize(trace);
  trace.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

BoundCheck check_bounds(const ExperimentTrace& trace, const ComparatorSpec& comparator) {
  BoundCheck check;
  check.comparator = comparator.describe();
  const double tolerance = trace.config.slack_tolerance;
  replay_bounds(trace, comparator, [&](std::size_t, const RegretSummary& s, const BoundValue& b) {
    const double slack = b.value - s.regret;
    check.min_slack = std::min(check.min_slack, slack);
    check.clamped = check.clamped || b.clamped;
    if (slack < -tolerance * std::max(1.0, std::abs(b.value))) ++check.violations;
    ++check.rounds;
  });
  return check;
}

Vector minimize_quadratic(const DomainOracle& domain, double a, const Vector& c) {
  Vector u;
  double step = 1.0;
  if (a > 0.0) {
    u = domain.project(-c / a);
    step = 1.0 / a;
  } else if (c.norm() == 0.0) {
    return domain.project(domain.enclosing_center());
  } else {
    // A linear objective is minimized at the support point in direction -c.
    step = domain.enclosing_radius() / c.norm();
    u = domain.project(domain.enclosing_center() - 1e6 * step * c);
  }
  const Vector grad = a * u + c;
  const double mapping = (u - domain.project(u - step * grad)).norm() / step;
  if (mapping > 1e-8 * std::max(1.0, grad.norm())) {
    throw std::runtime_error(fmt::format(
        "offline comparator: gradient mapping {:.3e} above tolerance", mapping));
  }
  return u;
}

ComparatorSpec compute_offline_comparator(const ExperimentTrace& trace, std::size_t prefix) {
  const std::size_t T = prefix == 0 ? trace.observations.size() : prefix;
  if (T == 0 || T > trace.observations.size()) {
    throw InvalidInput("offline comparator: empty trace or prefix beyond its end");
  }
  if (trace.setting == Setting::experts) {
    Vector total = Vector::Zero(trace.observations.front().size());
    for (std::size_t i = 0; i < T; ++i) total += trace.observations[i];
    Eigen::Index best = 0;
    total.minCoeff(&best);
    return ComparatorSpec::single_expert(static_cast<std::size_t>(best),
                                         static_cast<std::size_t>(total.size()));
  }
  CompensatedSum curvature;
  Vector linear = Vector::Zero(static_cast<Eigen::Index>(trace.domain->dimension()));
  for (std::size_t i = 0; i < T; ++i) {
    const OcoLoss& l = trace.losses[i];
    if (l.kind == OcoLoss::Kind::quadratic) {
      curvature.add(l.weight);
      linear -= l.weight * l.vector;
    } else {
      linear += l.weight * l.vector;
    }
  }
  return ComparatorSpec::point(minimize_quadratic(*trace.domain, curvature.value(), linear));
}

double comparator_loss(const ExperimentTrace& trace, const ComparatorSpec& comparator,
                       std::size_t prefix) {
  const std::size_t T = prefix == 0 ? trace.observations.size() : prefix;
  CompensatedSum total;
  for (std::size_t i = 0; i < T; ++i) {
    if (trace.setting == Setting::experts) {
      total.add(comparator.weights().dot(trace.observations[i]));
    } else {
      total.add(trace.losses[i].value(comparator.weights()));
    }
  }
  return total.value();
}

}  // namespace ladapt::harness
