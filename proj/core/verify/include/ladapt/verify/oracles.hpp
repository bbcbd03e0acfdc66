#pragma once

#include <cstddef>
#include <functional>

#include "ladapt/metagrad.hpp"
#include "ladapt/numerics.hpp"
#include "ladapt/projection.hpp"

// Slow, independent reference computations. Nothing here shares code with
// the quantity it checks beyond the Eigen types.
namespace ladapt::verify {

// log of the integral of exp(eta R - eta^2 V) over [0, a], by Boost's
// adaptive 61-point Gauss-Kronrod rule after factoring out the peak.
double quadrature_log_integral(double R, double V, double a);

// Squint weights with every integral evaluated by quadrature.
Vector quadrature_squint_weights(const Vector& prior, const Vector& regret,
                                 const Vector& variance, double upper_limit);

// Squint potential with Boost quadrature and the removable singularity at
// zero handled by a series in eta.
double quadrature_squint_potential(const Vector& prior, const Vector& regret,
                                   const Vector& variance, double upper_limit);

// Minimizer of (u - x)^T M (u - x) over |x| <= D/2 with
// M = I/D^2 + 2 eta^2 gram, by accelerated projected gradient with
// adaptive restarts. Plain loops, no decomposition of M.
Vector brute_force_projection(double diameter, const Matrix& gram, const Vector& unprojected,
                              double eta);

struct KktReport {
  double angle = 0.0;        // between -grad and the point, radians
  double norm_error = 0.0;   // | |x| - D/2 |
};

// Stationarity of an exterior projection: the objective gradient at x must
// point along -x and x must lie on the sphere.
KktReport projection_kkt(double diameter, const Matrix& gram, const Vector& unprojected,
                         double eta, const Vector& x);

// 128 halvings of [lower, upper] for a decreasing map.
double bisection_root(const std::function<double(double)>& f, double target, double lower,
                      double upper);

// Minimizes an objective over a square grid of n x n points clipped to the
// disc of the given center and radius (d = 2 only).
Vector grid_minimize_disc(const Vector& center, double radius, std::size_t n,
                          const std::function<double(const Vector&)>& objective);

// Master prediction from unnormalized weights eta * exp(log_weight), summed
// in the order the slaves are stored. Valid while the weights stay in the
// range of a double.
Vector direct_master(const MetaGradState& state);

}  // namespace ladapt::verify
