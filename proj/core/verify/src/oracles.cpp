#include "ladapt/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ladapt::verify {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

constexpr unsigned kMaxDepth = 15;
constexpr double kTolerance = 1e-13;

// Boost's error estimate degrades on very short intervals, so every
// integral is taken over [0, 1] after an affine change of variable.
template <class F>
double integrate(const F& f, double lo, double hi) {
  const double width = hi - lo;
  auto g = [&](double u) { return f(lo + width * u); };
  return width * Kronrod::integrate(g, 0.0, 1.0, kMaxDepth, kTolerance);
}

void clip_to_ball(double radius, Vector& z) {
  const double n = z.norm();
  if (n > radius) z *= radius / n;
}

}  // namespace

double quadrature_log_integral(double R, double V, double a) {
  double peak = 0.0;
  if (V > 0.0) {
    peak = std::clamp(R / (2.0 * V), 0.0, a);
  } else if (R > 0.0) {
    peak = a;
  }
  const double top = peak * R - peak * peak * V;
  auto f = [&](double eta) { return std::exp(eta * R - eta * eta * V - top); };
  double total = 0.0;
  if (peak > 0.0) total += integrate(f, 0.0, peak);
  if (peak < a) total += integrate(f, peak, a);
  return top + std::log(total);
}

Vector quadrature_squint_weights(const Vector& prior, const Vector& regret,
                                 const Vector& variance, double upper_limit) {
  const Eigen::Index K = prior.size();
  Vector logs(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    logs[k] = std::log(prior[k]) + quadrature_log_integral(regret[k], variance[k], upper_limit);
  }
  const double top = logs.maxCoeff();
  Vector w = (logs.array() - top).exp().matrix();
  return w / w.sum();
}

double quadrature_squint_potential(const Vector& prior, const Vector& regret,
                                   const Vector& variance, double upper_limit) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < prior.size(); ++k) {
    const double R = regret[k];
    const double V = variance[k];
    auto f = [&](double eta) {
      if (eta == 0.0) return R;
      return std::expm1(eta * R - eta * eta * V) / eta;
    };
    total += prior[k] * integrate(f, 0.0, upper_limit);
  }
  return total;
}

Vector brute_force_projection(double diameter, const Matrix& gram, const Vector& unprojected,
                              double eta) {
  const Eigen::Index d = unprojected.size();
  const double radius = diameter / 2.0;
  Matrix M = 2.0 * eta * eta * gram;
  for (Eigen::Index i = 0; i < d; ++i) M(i, i) += 1.0 / (diameter * diameter);

  // Gershgorin bound on the largest eigenvalue.
  double lipschitz = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) lipschitz = std::max(lipschitz, M.row(i).cwiseAbs().sum());
  lipschitz *= 2.0;

  Vector x = unprojected;
  clip_to_ball(radius, x);
  Vector y = x;
  Vector previous = x;
  double momentum = 1.0;
  int quiet = 0;
  for (int it = 0; it < 5'000'000 && quiet < 20; ++it) {
    Vector next = y - (2.0 / lipschitz) * (M * (y - unprojected));
    clip_to_ball(radius, next);
    const double step = (next - x).norm();
    quiet = step <= 1e-16 * (1.0 + next.norm()) ? quiet + 1 : 0;
    previous = x;
    x = next;
    if ((y - x).dot(x - previous) > 0.0) {
      momentum = 1.0;
      y = x;
      continue;
    }
    const double following = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = x + ((momentum - 1.0) / following) * (x - previous);
    momentum = following;
  }
  return x;
}

KktReport projection_kkt(double diameter, const Matrix& gram, const Vector& unprojected,
                         double eta, const Vector& x) {
  const Eigen::Index d = unprojected.size();
  Matrix M = 2.0 * eta * eta * gram;
  for (Eigen::Index i = 0; i < d; ++i) M(i, i) += 1.0 / (diameter * diameter);
  const Vector descent = M * (unprojected - x);
  KktReport report;
  const double c = descent.dot(x) / (descent.norm() * x.norm());
  report.angle = std::acos(std::clamp(c, -1.0, 1.0));
  // acos loses half the digits near 1; use the chord between unit vectors.
  if (c > 0.5) {
    const Vector a = descent.normalized();
    const Vector b = x.normalized();
    report.angle = 2.0 * std::asin(std::min(1.0, (a - b).norm() / 2.0));
  }
  report.norm_error = std::abs(x.norm() - diameter / 2.0);
  return report;
}

double bisection_root(const std::function<double(double)>& f, double target, double lower,
                      double upper) {
  for (int i = 0; i < 128; ++i) {
    const double mid = 0.5 * (lower + upper);
    if (f(mid) > target) {
      lower = mid;
    } else {
      upper = mid;
    }
  }
  return 0.5 * (lower + upper);
}

Vector grid_minimize_disc(const Vector& center, double radius, std::size_t n,
                          const std::function<double(const Vector&)>& objective) {
  Vector best = center;
  double best_value = std::numeric_limits<double>::infinity();
  Vector p(2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p[0] = center[0] + radius * (-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1));
      p[1] = center[1] + radius * (-1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1));
      if ((p - center).norm() > radius) continue;
      const double v = objective(p);
      if (v < best_value) {
        best_value = v;
        best = p;
      }
    }
  }
  return best;
}

Vector direct_master(const MetaGradState& state) {
  Vector numerator = Vector::Zero(static_cast<Eigen::Index>(state.dimension));
  double denominator = 0.0;
  for (const SlaveState& s : state.active) {
    const double w = s.eta * std::exp(s.log_weight);
    numerator += w * s.mean;
    denominator += w;
  }
  if (state.active.empty()) return numerator;
  return numerator / denominator;
}

}  // namespace ladapt::verify
