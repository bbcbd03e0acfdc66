#include "ladapt/verify/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "ladapt/harness/rng.hpp"
#include "ladapt/metagrad.hpp"
#include "ladapt/projection.hpp"
#include "ladapt/restart.hpp"
#include "ladapt/squint.hpp"
#include "ladapt/verify/oracles.hpp"

namespace ladapt::verify {

namespace {

using harness::Rng;

// Collects outcomes; keeps the first failure message.
class Tally {
 public:
  explicit Tally(std::string name) : start_(std::chrono::steady_clock::now()) {
    result_.name = std::move(name);
  }

  void check(bool ok, const std::function<std::string()>& message) {
    ++result_.checks;
    if (ok) return;
    if (result_.failures++ == 0) result_.detail = message();
  }
  void worst(double value) { result_.worst = std::max(result_.worst, value); }
  void least(double value) {
    if (!seen_least_ || value < result_.worst) result_.worst = value;
    seen_least_ = true;
  }
  void cases(std::size_t n) { result_.cases += n; }

  CheckResult finish(const std::string& summary) {
    result_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (result_.failures == 0) {
      result_.detail = summary.empty() ? fmt::format("max error {:.3e}", result_.worst) : summary;
    }
    return result_;
  }

 private:
  CheckResult result_;
  std::chrono::steady_clock::time_point start_;
  bool seen_least_ = false;
};

double log_uniform(Rng& rng, double lo_exp, double hi_exp) {
  return std::pow(10.0, rng.uniform(lo_exp, hi_exp));
}

Vector random_unit(Rng& rng, Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
  return v / v.norm();
}

// Expert losses with persistent per-expert means, occasional all-equal
// rounds and scale jumps by 10 or 100.
class ExpertScript {
 public:
  ExpertScript(Rng& rng, std::size_t experts) : rng_(rng), means_(static_cast<Eigen::Index>(experts)) {
    for (Eigen::Index k = 0; k < means_.size(); ++k) means_[k] = rng_.uniform(0.2, 0.8);
  }

  Vector next() {
    if (rng_.bernoulli(0.02)) scale_ *= rng_.bernoulli(0.5) ? 10.0 : 100.0;
    const Eigen::Index K = means_.size();
    Vector l(K);
    if (rng_.bernoulli(0.05)) {
      l.setConstant(rng_.uniform());
    } else {
      for (Eigen::Index k = 0; k < K; ++k) l[k] = rng_.bernoulli(means_[k]) ? 1.0 : 0.0;
    }
    return scale_ * l;
  }

 private:
  Rng& rng_;
  Vector means_;
  double scale_ = 1.0;
};

// Gradients with a drift direction, noise, zero rounds and scale jumps.
class GradientScript {
 public:
  GradientScript(Rng& rng, std::size_t dimension)
      : rng_(rng), drift_(random_unit(rng, static_cast<Eigen::Index>(dimension))) {
    drift_ *= rng_.uniform(0.0, 1.0);
  }

  Vector next() {
    const Eigen::Index d = drift_.size();
    if (rng_.bernoulli(0.02)) scale_ *= rng_.bernoulli(0.5) ? 10.0 : 100.0;
    if (rng_.bernoulli(0.03)) return Vector::Zero(d);
    Vector g = drift_;
    for (Eigen::Index i = 0; i < d; ++i) g[i] += rng_.normal() / std::sqrt(static_cast<double>(d));
    return scale_ * g;
  }

 private:
  Rng& rng_;
  Vector drift_;
  double scale_ = 1.0;
};

constexpr std::size_t kExpertCounts[] = {2, 5, 16};
constexpr std::size_t kDimensions[] = {1, 2, 5, 16};
constexpr std::size_t kProjectionDimensions[] = {1, 2, 3, 5};

std::size_t random_horizon(Rng& rng) { return 100 + static_cast<std::size_t>(rng.uniform() * 401.0); }

// Runs MetaGrad+C on a random stream and calls visit(state, t) after every
// round. The stream parameters are drawn from the stream index and seed.
void metagrad_streams(std::size_t streams, std::uint64_t seed, bool record_history,
                      const std::function<void(const MetaGradState&, std::size_t)>& visit) {
  for (std::size_t i = 0; i < streams; ++i) {
    Rng rng(seed + 7919 * i);
    const std::size_t d = kDimensions[i % 4];
    const double D = log_uniform(rng, -1.0, 1.0);
    const double B = log_uniform(rng, -2.0, 1.0);
    const std::size_t T = random_horizon(rng);
    MetaGradC learner(d, D, B, {}, record_history);
    GradientScript script(rng, d);
    for (std::size_t t = 1; t <= T; ++t) {
      learner.round(Gradient(script.next()));
      visit(learner.state(), t);
    }
  }
}

void squint_streams(std::size_t streams, std::uint64_t seed,
                    const std::function<void(const SquintState&, std::size_t)>& visit) {
  for (std::size_t i = 0; i < streams; ++i) {
    Rng rng(seed + 104729 * i);
    const std::size_t K = kExpertCounts[i % 3];
    const double B = log_uniform(rng, -2.0, 1.0);
    const std::size_t T = random_horizon(rng);
    SquintC learner = SquintC::uniform(K, B, false);
    ExpertScript script(rng, K);
    for (std::size_t t = 1; t <= T; ++t) {
      learner.round(LossVector(script.next()));
      visit(learner.state(), t);
    }
  }
}

struct ProjectionInstance {
  double diameter;
  double eta;
  Matrix gram;
  Vector unprojected;
};

ProjectionInstance random_instance(Rng& rng, std::size_t d, bool interior) {
  const auto n = static_cast<Eigen::Index>(d);
  ProjectionInstance p;
  p.diameter = log_uniform(rng, -1.0, 1.0);
  Matrix A(n, n + 1);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
  p.gram = A * A.transpose() * log_uniform(rng, -2.0, 2.0);
  // eta^2 lambda spans the regime from negligible to dominant metric terms.
  p.eta = log_uniform(rng, -2.0, 0.5) / p.diameter;
  const double radius = p.diameter / 2.0;
  const double norm = interior ? radius * rng.uniform(0.0, 0.999)
                               : radius * (1.0 + log_uniform(rng, -3.0, 2.0));
  p.unprojected = norm * random_unit(rng, n);
  return p;
}

}  // namespace

CheckResult check_squint_potential(std::size_t streams, std::uint64_t seed) {
  Tally tally("squint potential <= ln(B_(T-1)/B)");
  tally.cases(streams);
  double margin = std::numeric_limits<double>::infinity();
  squint_streams(streams, seed, [&](const SquintState& s, std::size_t t) {
    const double limit = std::log(s.scale.previous_max() / s.scale.initial_scale());
    const double core = squint_potential(s);
    const double reference = quadrature_squint_potential(
        s.prior, s.clipped_regret_values(), s.clipped_variance_values(),
        0.5 / s.scale.previous_max());
    const double value = std::max(core, reference);
    margin = std::min(margin, limit - value);
    tally.check(value <= limit + 1e-9, [&] {
      return fmt::format("K={} t={}: potential {:.17g} (quadrature {:.17g}) > {:.17g}",
                         s.experts(), t, core, reference, limit);
    });
    tally.check(std::abs(core - reference) <= 1e-9, [&] {
      return fmt::format("K={} t={}: potential {:.17g} disagrees with quadrature {:.17g}",
                         s.experts(), t, core, reference);
    });
  });
  tally.least(margin);
  return tally.finish(fmt::format("smallest margin {:.3e}", margin));
}

CheckResult check_squint_weights(std::size_t states, std::uint64_t seed) {
  Tally tally("squint weights vs quadrature");
  tally.cases(states);
  Rng rng(seed);
  for (std::size_t i = 0; i < states; ++i) {
    const auto K = static_cast<Eigen::Index>(2 + rng.next() % 7);
    const double B = log_uniform(rng, -2.0, 2.0);
    Vector prior(K), R(K), V(K);
    for (Eigen::Index k = 0; k < K; ++k) {
      prior[k] = rng.uniform(0.05, 1.0);
      // |Rbar| up to 500 in units of B; V at least R^2/T for T <= 200 rounds.
      R[k] = rng.uniform(-500.0, 500.0) * B;
      const double floor_v = R[k] * R[k] / 200.0;
      V[k] = floor_v + rng.uniform(0.0, 200.0) * B * B;
      if (rng.bernoulli(0.1)) V[k] = 0.0;
    }
    prior /= prior.sum();
    SquintState state(prior, B);
    for (Eigen::Index k = 0; k < K; ++k) {
      state.clipped_regret[static_cast<std::size_t>(k)] = CompensatedSum(R[k]);
      state.clipped_variance[static_cast<std::size_t>(k)] = CompensatedSum(V[k]);
    }
    const Vector closed = squint_weights(state);
    const Vector reference = quadrature_squint_weights(prior, R, V, 0.5 / B);
    const double err = (closed - reference).cwiseAbs().maxCoeff();
    tally.worst(err);
    tally.check(err <= 1e-8, [&] {
      return fmt::format("state {}: weights differ by {:.3e} from quadrature", i, err);
    });
  }
  return tally.finish("");
}

CheckResult check_metagrad_potential(std::size_t streams, std::uint64_t seed) {
  Tally tally("metagrad potential <= 1");
  tally.cases(streams);
  double top = 0.0;
  metagrad_streams(streams, seed, false, [&](const MetaGradState& s, std::size_t t) {
    const double p = metagrad_potential(s);
    top = std::max(top, p);
    tally.check(p <= 1.0 + 1e-9, [&] {
      return fmt::format("d={} t={}: potential {:.17g}", s.dimension, t, p);
    });
  });
  tally.worst(top);
  return tally.finish(fmt::format("largest potential {:.6f}", top));
}

CheckResult check_slave_count(std::size_t streams, std::uint64_t seed) {
  Tally tally("active slaves <= floor(log2 t)");
  tally.cases(streams);
  std::size_t most = 0;
  metagrad_streams(streams, seed, false, [&](const MetaGradState& s, std::size_t t) {
    // After round t the active set is the one predicting in round t + 1.
    const auto limit = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(t + 1))));
    most = std::max(most, s.active.size());
    tally.check(s.active.size() <= limit, [&] {
      return fmt::format("round {}: {} active slaves, limit {}", t + 1, s.active.size(), limit);
    });
  });
  tally.worst(static_cast<double>(most));
  return tally.finish(fmt::format("at most {} active", most));
}

CheckResult check_clipping_identity(std::size_t streams, std::uint64_t seed) {
  Tally tally("R - Rbar <= B_T - B_0");
  tally.cases(2 * streams);
  double margin = std::numeric_limits<double>::infinity();
  auto verify = [&](const RegretLedger& ledger, const ScaleTracker& scale,
                    const ComparatorSpec& comparator, std::size_t t) {
    const RegretSummary r = ledger.against(comparator);
    const double limit = scale.current_max() - scale.initial_scale();
    const double gap = r.regret - r.clipped_regret;
    margin = std::min(margin, (limit - gap) / std::max(1.0, scale.current_max()));
    tally.check(gap <= limit + 1e-9 * std::max(1.0, scale.current_max()), [&] {
      return fmt::format("t={} {}: R - Rbar = {:.17g} > {:.17g}", t, comparator.describe(), gap,
                         limit);
    });
  };
  squint_streams(streams, seed, [&](const SquintState& s, std::size_t t) {
    const std::size_t K = s.experts();
    for (std::size_t k = 0; k < K; ++k) verify(s.ledger, s.scale, ComparatorSpec::single_expert(k, K), t);
    verify(s.ledger, s.scale, ComparatorSpec::distribution(s.prior), t);
  });
  std::vector<Vector> points;
  std::size_t current_dimension = 0;
  double current_diameter = 0.0;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  metagrad_streams(streams, seed, false, [&](const MetaGradState& s, std::size_t t) {
    if (s.dimension != current_dimension || s.diameter != current_diameter || t == 1) {
      current_dimension = s.dimension;
      current_diameter = s.diameter;
      const auto d = static_cast<Eigen::Index>(s.dimension);
      points.assign(1, Vector::Zero(d));
      for (Eigen::Index i = 0; i < d; ++i) {
        for (double side : {-0.5, 0.5}) {
          Vector u = Vector::Zero(d);
          u[i] = side * s.diameter;
          points.push_back(u);
        }
      }
      for (int j = 0; j < 5; ++j) {
        points.push_back(random_unit(rng, d) * 0.5 * s.diameter * std::sqrt(rng.uniform()));
      }
    }
    for (const Vector& u : points) verify(s.ledger, s.scale, ComparatorSpec::point(u), t);
  });
  tally.least(margin);
  return tally.finish(fmt::format("smallest relative margin {:.3e}", margin));
}

CheckResult check_log_weights(std::size_t streams, std::uint64_t seed) {
  Tally tally("slave log-weights vs surrogate history");
  tally.cases(streams);
  metagrad_streams(streams, seed, true, [&](const MetaGradState& s, std::size_t t) {
    for (const SlaveState& slave : s.active) {
      double sum = std::log(grid_prior(slave.index));
      for (double f : slave.surrogate_history) sum -= f;
      const double err = std::abs(std::expm1(slave.log_weight - sum));
      tally.worst(err);
      tally.check(err <= 1e-9, [&] {
        return fmt::format("t={} slave {}: log-weight {:.17g} vs recomputed {:.17g}", t,
                           slave.index, slave.log_weight, sum);
      });
    }
  });
  return tally.finish("");
}

CheckResult check_master_formula(std::size_t streams, std::uint64_t seed) {
  Tally tally("master prediction vs direct formula");
  tally.cases(streams);
  metagrad_streams(streams, seed, false, [&](const MetaGradState& s, std::size_t t) {
    const Vector direct = direct_master(s);
    const double err = (direct - s.prediction).cwiseAbs().maxCoeff() / s.diameter;
    tally.worst(err);
    tally.check(err <= 1e-12, [&] {
      return fmt::format("t={}: master differs from direct formula by {:.3e} (relative to D)",
                         t, err);
    });
    tally.check(s.prediction.norm() <= 0.5 * s.diameter + 1e-10, [&] {
      return fmt::format("t={}: master prediction outside the ball", t);
    });
  });
  return tally.finish("");
}

CheckResult check_projection(std::size_t instances, std::uint64_t seed) {
  Tally tally("ball projection vs brute force");
  tally.cases(instances);
  Rng rng(seed);
  double worst_coordinate = 0.0;
  double worst_residual = 0.0;
  double worst_angle = 0.0;
  int most_iterations = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t d = kProjectionDimensions[i % 4];
    const bool interior = i % 10 == 9;
    const ProjectionInstance p = random_instance(rng, d, interior);
    const BallProjector projector(p.diameter, p.gram);
    const BallProjection result = projector.project(p.unprojected, p.eta);
    const double D2 = p.diameter * p.diameter;

    if (interior) {
      tally.check(!result.projected && result.point == p.unprojected, [&] {
        return fmt::format("instance {}: interior point was moved", i);
      });
      continue;
    }
    const Vector reference = brute_force_projection(p.diameter, p.gram, p.unprojected, p.eta);
    const double err = (result.point - reference).cwiseAbs().maxCoeff();
    worst_coordinate = std::max(worst_coordinate, err);
    tally.check(err <= 1e-6, [&] {
      return fmt::format("instance {} (d={}): differs from brute force by {:.3e}", i, d, err);
    });
    const double residual = std::abs(result.solve.residual);
    worst_residual = std::max(worst_residual, residual / D2);
    tally.check(residual <= 1e-10 * D2, [&] {
      return fmt::format("instance {}: Newton residual {:.3e}", i, residual);
    });
    most_iterations = std::max(most_iterations, result.solve.iterations);
    tally.check(result.solve.iterations <= 50, [&] {
      return fmt::format("instance {}: {} Newton iterations", i, result.solve.iterations);
    });
    const Vector rotated = projector.basis().transpose() * projector.apply_metric(p.unprojected, p.eta);
    const double at_lower = projector.rho(rotated, p.eta, result.solve.lower).first;
    const double at_upper = projector.rho(rotated, p.eta, result.solve.upper).first;
    tally.check(at_lower > at_upper, [&] {
      return fmt::format("instance {}: rho not decreasing across the bracket", i);
    });
    const KktReport kkt = projection_kkt(p.diameter, p.gram, p.unprojected, p.eta, result.point);
    worst_angle = std::max(worst_angle, kkt.angle);
    tally.check(kkt.angle <= 1e-8 && kkt.norm_error <= 1e-8, [&] {
      return fmt::format("instance {}: KKT angle {:.3e}, norm error {:.3e}", i, kkt.angle,
                         kkt.norm_error);
    });
  }
  tally.worst(worst_coordinate);
  return tally.finish(fmt::format(
      "max coordinate error {:.2e}, max residual/D^2 {:.2e}, max KKT angle {:.2e}, max Newton "
      "iterations {}",
      worst_coordinate, worst_residual, worst_angle, most_iterations));
}

CheckResult check_newton_bisection(std::size_t instances, std::uint64_t seed) {
  Tally tally("Newton root vs bisection");
  tally.cases(instances);
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const ProjectionInstance p = random_instance(rng, kProjectionDimensions[i % 4], false);
    const BallProjector projector(p.diameter, p.gram);
    const Vector rotated = projector.basis().transpose() * projector.apply_metric(p.unprojected, p.eta);
    const double target = p.diameter * p.diameter / 4.0;
    const ScalarMap rho = [&](double x) { return projector.rho(rotated, p.eta, x); };
    const double lower = 1.0 / (p.diameter * p.diameter);
    double upper = 2.0 * lower;
    while (rho(upper).first >= target) upper *= 2.0;
    const NewtonResult newton = newton_root(rho, target, lower, upper);
    const double bisected =
        bisection_root([&](double x) { return rho(x).first; }, target, lower, upper);
    const double err = std::abs(newton.root - bisected) / bisected;
    tally.worst(err);
    tally.check(err <= 1e-10, [&] {
      return fmt::format("instance {}: Newton {:.17g} vs bisection {:.17g}", i, newton.root,
                         bisected);
    });
  }
  return tally.finish("");
}

CheckResult check_scale_free(std::size_t streams, std::uint64_t seed) {
  Tally tally("scale-free predictions and restarts");
  tally.cases(2 * streams);
  double worst = 0.0;
  for (std::size_t i = 0; i < streams; ++i) {
    Rng rng(seed + 31 * i);
    const std::size_t K = kExpertCounts[i % 3];
    ExpertScript expert_script(rng, K);
    std::vector<Vector> losses(400);
    for (Vector& l : losses) l = expert_script.next();
    const std::size_t d = kDimensions[i % 3];
    GradientScript gradient_script(rng, d);
    std::vector<Vector> gradients(400);
    for (std::size_t t = 0; t < gradients.size(); ++t) {
      // A silent start exercises the pre-start default play.
      gradients[t] = t < 3 ? Vector::Zero(static_cast<Eigen::Index>(d)) : gradient_script.next();
    }

    auto run_squint = [&](double c, std::vector<Vector>& predictions) {
      SquintL learner = SquintL::uniform(K);
      for (const Vector& l : losses) predictions.push_back(learner.round(LossVector(c * l)));
      std::vector<std::size_t> rounds;
      for (const RestartEvent& e : learner.supervisor().restarts()) rounds.push_back(e.round);
      return rounds;
    };
    auto run_metagrad = [&](double c, std::vector<Vector>& predictions) {
      MetaGradL learner(d, 2.0);
      for (const Vector& g : gradients) predictions.push_back(learner.round(Gradient(c * g)));
      std::vector<std::size_t> rounds;
      for (const RestartEvent& e : learner.supervisor().restarts()) rounds.push_back(e.round);
      return rounds;
    };

    for (const bool experts : {true, false}) {
      std::vector<Vector> base;
      const auto base_restarts = experts ? run_squint(1.0, base) : run_metagrad(1.0, base);
      for (const double c : {1e-3, 1e3}) {
        std::vector<Vector> scaled;
        const auto restarts = experts ? run_squint(c, scaled) : run_metagrad(c, scaled);
        double err = 0.0;
        for (std::size_t t = 0; t < base.size(); ++t) {
          err = std::max(err, (base[t] - scaled[t]).cwiseAbs().maxCoeff());
        }
        worst = std::max(worst, err);
        const char* which = experts ? "squint+l" : "metagrad+l";
        tally.check(err <= 1e-9, [&] {
          return fmt::format("{} stream {} c={:g}: predictions differ by {:.3e}", which, i, c, err);
        });
        tally.check(restarts == base_restarts, [&] {
          return fmt::format("{} stream {} c={:g}: restart rounds differ ({} vs {})", which, i, c,
                             restarts.size(), base_restarts.size());
        });
      }
    }
  }
  tally.worst(worst);
  return tally.finish(fmt::format("max deviation {:.2e}", worst));
}

CheckResult check_restart_count(std::uint64_t seed) {
  Tally tally("restart counts");
  Rng rng(seed);

  {
    RestartSupervisor s;
    for (int t = 0; t < 1000; ++t) s.observe(3.0);
    tally.cases(1);
    tally.check(s.restarts().empty(), [&] {
      return fmt::format("constant scale: {} restarts", s.restarts().size());
    });
  }
  {
    RestartSupervisor s;
    s.observe(1.0);
    const auto action = s.observe(1e6);
    tally.cases(1);
    tally.check(action == RestartSupervisor::Action::restart && s.restarts().size() == 1 &&
                    s.restarts().front().round == 2,
                [] { return std::string("jump 1 -> 1e6 did not restart at round 2"); });
  }
  auto limit_of = [](const ScaleTracker& global, double first) {
    return 2.0 + std::log2(global.current_max() / first);
  };
  {
    MetaGradL learner(3, 2.0);
    const Vector v = random_unit(rng, 3);
    double first = 0.0;
    for (int t = 1; t <= 60; ++t) {
      learner.round(Gradient(std::ldexp(1.0, t) * v));
      if (t == 1) first = learner.supervisor().global().current_max();
    }
    const double limit = limit_of(learner.supervisor().global(), first);
    const auto n = learner.supervisor().restarts().size();
    tally.cases(1);
    tally.check(static_cast<double>(n) <= limit, [&] {
      return fmt::format("metagrad+l geometric stream: {} restarts > {:.2f}", n, limit);
    });
  }
  {
    SquintL learner = SquintL::uniform(2);
    double first = 0.0;
    for (int t = 1; t <= 60; ++t) {
      Vector l(2);
      l << 0.0, std::ldexp(1.0, t);
      learner.round(LossVector(l));
      if (t == 1) first = learner.supervisor().global().current_max();
    }
    const double limit = limit_of(learner.supervisor().global(), first);
    const auto n = learner.supervisor().restarts().size();
    tally.cases(1);
    tally.check(static_cast<double>(n) <= limit, [&] {
      return fmt::format("squint+l geometric stream: {} restarts > {:.2f}", n, limit);
    });
  }
  return tally.finish("restart counts within limits");
}

std::vector<std::string> suite_names() { return {"squint", "metagrad", "projection", "restart"}; }

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "squint") {
    return {check_squint_potential(100, seed), check_squint_weights(200, seed),
            check_clipping_identity(50, seed)};
  }
  if (name == "metagrad") {
    return {check_metagrad_potential(100, seed), check_slave_count(100, seed),
            check_log_weights(30, seed), check_master_formula(30, seed)};
  }
  if (name == "projection") {
    return {check_projection(500, seed), check_newton_bisection(200, seed)};
  }
  if (name == "restart") {
    return {check_scale_free(10, seed), check_restart_count(seed)};
  }
  throw std::invalid_argument(fmt::format("unknown suite '{}'", name));
}

}  // namespace ladapt::verify
