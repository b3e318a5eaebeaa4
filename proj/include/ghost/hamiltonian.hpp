#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ghost/errors.hpp"
#include "ghost/model.hpp"

namespace ghost {

// Semiclassical Hamiltonian H(x, p) = sum_i (exp(r_i p) - 1) w_i(x) of a model
// and the vector field of Hamilton's equations
//   dx/dt =  dH/dp = sum_i r_i exp(r_i p) w_i(x)
//   dp/dt = -dH/dx = -sum_i (exp(r_i p) - 1) w_i'(x)
// augmented with the action rate dS/dt = p dx/dt - H.
class HamiltonianSystem {
 public:
  explicit HamiltonianSystem(ModelSpec model) : model_(std::move(model)) {}

  const ModelSpec& model() const { return model_; }

  double energy(double x, double p) const;
  double dx_dt(double x, double p) const;
  double dp_dt(double x, double p) const;

  struct Flow {
    double dx;
    double dp;
    double dS;
  };
  Flow flow(double x, double p) const;

 private:
  ModelSpec model_;
};

double hamiltonian_value(const HamiltonianSystem& sys, double x, double p);

enum class ExitReason { ReachedExitThreshold, LeftWindow, TimeCap, StepFailure };
std::string_view to_string(ExitReason reason);

struct StopSpec {
  double x_exit = 0.0;  // stop once x <= x_exit
  double x_max = std::numeric_limits<double>::infinity();      // leave once x > x_max
  double p_max_abs = std::numeric_limits<double>::infinity();  // leave once |p| > p_max_abs
  double t_cap = 1e9;
  // Levels whose crossings are timed without stopping the orbit.
  std::vector<double> x_marks;
  bool record_samples = true;
  std::size_t max_steps = 20'000'000;
};

struct OrbitSample {
  double t;
  double x;
  double p;
  double S;
};

struct MarkCrossing {
  double level;
  double t;
  int direction;  // -1: x decreasing through the level, +1: increasing
};

struct TrajectoryRecord {
  std::vector<OrbitSample> samples;  // accepted steps (if recorded), always with start and end
  OrbitSample final{};
  ExitReason exit_reason = ExitReason::StepFailure;
  double flight_time = 0.0;  // time of the triggering event
  double energy_drift = 0.0; // max |H(x(t), p(t)) - H(x0, p0)| over accepted steps
  std::vector<MarkCrossing> crossings;
  std::size_t steps = 0;
  std::size_t rejected = 0;

  // First crossing of `level` in the given direction, if any.
  std::optional<double> crossing_time(double level, int direction = -1) const;
};

inline constexpr double kMinTolerance = 1e-15;
inline constexpr double kMaxTolerance = 1e-8;
inline constexpr double kEventTimeResolution = 1e-12;

// Adaptive RKF 7(8) integration of (x, p, S) from (x0, p0, 0). Events are
// localized by bisection on the accepted step to kEventTimeResolution.
// Throws DomainError for x0 <= 0 or tol outside [1e-15, 1e-8]. Step-size
// underflow ends the orbit with ExitReason::StepFailure.
TrajectoryRecord integrate_orbit(const HamiltonianSystem& sys, double x0, double p0,
                                 const StopSpec& stop, double tol = 1e-12);

// Thrown when an orbit never crosses the requested window; carries the partial
// trajectory.
class NoTransitError : public NumericalError {
 public:
  NoTransitError(const std::string& what, TrajectoryRecord record)
      : NumericalError(what), record_(std::move(record)) {}
  const TrajectoryRecord& record() const { return record_; }

 private:
  TrajectoryRecord record_;
};

// Time between the downward crossings of x_c + delta and x_c - delta.
struct BottleneckTransit {
  double delta = 0.1;
};
// Time until x <= x_exit.
struct FullDecay {
  double x_exit;
};
using FlightMode = std::variant<BottleneckTransit, FullDecay>;

struct FlightOptions {
  double tol = 1e-12;
  double x_max_factor = 10.0;  // window x <= x_max_factor * x_c
  double p_max_abs = 5.0;
  double t_cap = 1e9;
};

// Flight time of the orbit through (x0, p0) of sys, whose model carries the
// epsilon of interest; x_c is the model's critical density. Throws
// NoTransitError when the orbit does not complete the requested passage.
double flight_time(const HamiltonianSystem& sys, double x0, double p0, const FlightMode& mode,
                   const FlightOptions& options = {});

// Default FullDecay exit 0.05 * x_c, default window delta 0.1.
inline constexpr double kDefaultExitFraction = 0.05;
inline constexpr double kDefaultBottleneckDelta = 0.1;

// Model at epsilon = eps_c + phi.
ModelSpec model_at_phi(const ModelSpec& model, double phi);

struct PathWeight {
  double log_weight;
  std::optional<double> weight;  // empty when exp(log_weight) < 1e-300
};

// exp(-omega * S) evaluated in log space. Throws DomainError for omega <= 0.
PathWeight path_weight(double action, double omega);

struct PathWeightSample {
  double p0;
  double action;
  double log_weight;
  std::optional<double> weight;
  double omega;
  ExitReason exit_reason;
  double flight_time;
  bool failed = false;  // integration threw; action/weight are not meaningful
};

struct WeightProfileOptions {
  FlightOptions flight;
  double exit_fraction = kDefaultExitFraction;
};

// For each p0, integrate from (x0, p0) to the first exit event (FullDecay
// threshold or leaving the window) and record the action and its weight.
std::vector<PathWeightSample> weight_profile(const HamiltonianSystem& sys, double omega,
                                             std::span<const double> p0_grid, double x0,
                                             const WeightProfileOptions& options = {});

}  // namespace ghost
