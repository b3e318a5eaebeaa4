#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghost/curve.hpp"
#include "ghost/hamiltonian.hpp"
#include "ghost/model.hpp"

namespace ghost {

// Initial conditions (x0, p0) of a Hamiltonian flight-time ensemble. By
// default x0 = 1.5 x_c and p0 runs over n_p0 uniformly spaced values in
// [-p_span, 0) with p_span = min(p_span_max, |p_min,p(epsilon)|). Orbits are
// kept only when they reach the exit and their path weight at
// reference_omega is at least weight_threshold.
struct InitialConditionEnsemble {
  double x0_factor = 1.5;
  std::size_t n_p0 = 100;
  double p_span_max = 0.1;
  std::vector<double> p0_values;  // explicit list; overrides the uniform grid
  double weight_threshold = 1e-2;
  double reference_omega = 1e3;
  bool bottleneck = false;  // time the window crossing instead of the full decay
  double delta = kDefaultBottleneckDelta;
  double exit_fraction = kDefaultExitFraction;
  FlightOptions flight;

  static InitialConditionEnsemble negative_default() { return {}; }
  static InitialConditionEnsemble explicit_p0(std::vector<double> p0s);

  // p0 values used at the model's epsilon.
  std::vector<double> p0_grid(const ModelSpec& model) const;
  std::string describe() const;
  void validate() const;
};

struct OrbitOutcome {
  double p0;
  double flight_time;
  double action;
  double log_weight;
  ExitReason exit_reason;
  bool reached_exit;
  bool kept;
};

// Flight time, action and filter decision of a single ensemble member.
OrbitOutcome ensemble_orbit(const HamiltonianSystem& sys, double p0,
                            const InitialConditionEnsemble& ensemble);

// Mean flight time of the kept orbits at epsilon = eps_c + phi for each phi;
// spread is the ensemble standard deviation. Phi values with no kept orbit go
// to empty_phis. Throws ConfigError for phi <= 0 or a non-increasing grid.
ScalingCurve flight_time_sweep(const ModelSpec& model, std::span<const double> phi_grid,
                               const InitialConditionEnsemble& ensemble, std::size_t threads = 0);

struct SlopeFit {
  double slope;
  double intercept;
  double slope_stderr;
  double phi_lo;
  double phi_hi;
  double r_squared;
  std::size_t n;
};

// OLS of log(value) on log(phi) over the curve points with phi in
// [phi_lo, phi_hi]. Throws WindowError with fewer than 4 points.
SlopeFit fit_loglog_slope(const ScalingCurve& curve, double phi_lo, double phi_hi);

// Roots of 2p^2 + p - phi = 0 and of the matching quadratic in y near the
// critical point, for 0 < phi <= 1/12.
struct AppendixRoots {
  double phi;
  double p_minus;
  double p_plus;
  double c1;  // sqrt(0 - p_minus)
  std::complex<double> y_plus;
  std::complex<double> y_minus;
};

inline constexpr double kAppendixPhiMax = 1.0 / 12.0;

// Throws DomainError outside 0 < phi <= 1/12.
AppendixRoots appendix_roots(double phi);

// Integral of dx / |dx/dt(x, p_fixed)| from x_from down to x_to (< x_from) at
// epsilon = eps_c + phi. Throws PoleError when dx/dt vanishes or changes sign
// on the segment (the orbit at frozen p would never arrive).
double transit_time_between(const ModelSpec& model, double phi, double p_fixed, double x_from,
                            double x_to);

// Same over the bottleneck window [x_c - delta, x_c + delta].
double transit_time_quadrature(const ModelSpec& model, double phi, double p_fixed, double delta);

struct BendLocation {
  double phi_bend;
  double plateau;           // median of the 5 smallest-phi values
  std::size_t departure;    // first index of the decay window
  SlopeFit decay;           // power-law fit over the decay window
};

inline constexpr std::size_t kPlateauPoints = 5;
inline constexpr std::size_t kDecayFitPoints = 4;
inline constexpr double kDepartureFraction = 0.9;
inline constexpr double kPlateauMaxSlope = 0.1;

// Crossing of the plateau level with the power law fitted to the first
// kDecayFitPoints points from which the curve stays below 0.9 times the
// plateau. The points before that must have a log-log slope below
// kPlateauMaxSlope in magnitude. Throws RegimeError without a plateau, a decay
// window or a falling power law.
BendLocation bend_location(const ScalingCurve& curve);

struct CollapseOptions {
  double a_lo = -1.0, a_hi = 1.5;
  double b_lo = -1.0, b_hi = 1.5;
  std::size_t grid = 26;
  std::size_t refinements = 5;
  std::size_t min_overlap_points = 3;  // per curve
};

struct CollapseFit {
  double a;
  double b;
  double objective;
  double objective_at_origin;
  std::vector<double> curves_used;  // omega tags
};

// Collapse distance of the curves mapped to (log phi + a log Omega,
// log value + b log Omega): mean squared vertical distance of every point in
// the common range to the piecewise-linear interpolant of each other curve.
// Returns +inf when some curve has fewer than min_overlap_points in the common
// range.
double collapse_objective(std::span<const ScalingCurve> curves, double a, double b,
                          std::size_t min_overlap_points = 3);

// Grid search over the (a, b) box (which always also evaluates (0, 0)) followed
// by shrinking local grids. Throws ConfigError for fewer than two curves, a
// curve without omega or duplicate omegas, and OverlapError when no (a, b)
// gives an overlap.
CollapseFit collapse_fit(std::span<const ScalingCurve> curves, const CollapseOptions& options = {});

}  // namespace ghost
