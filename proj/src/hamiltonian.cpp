#include "ghost/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ghost/rkf78.hpp"

namespace ghost {

double HamiltonianSystem::energy(double x, double p) const {
  double h = 0.0;
  for (const auto& r : model_.reactions()) {
    h += std::expm1(r.step * p) * r.intensive_rate(x, model_.params());
  }
  return h;
}

double HamiltonianSystem::dx_dt(double x, double p) const {
  double v = 0.0;
  for (const auto& r : model_.reactions()) {
    v += r.step * std::exp(r.step * p) * r.intensive_rate(x, model_.params());
  }
  return v;
}

double HamiltonianSystem::dp_dt(double x, double p) const {
  double v = 0.0;
  const auto reactions = model_.reactions();
  for (std::size_t i = 0; i < reactions.size(); ++i) {
    v -= std::expm1(reactions[i].step * p) * model_.intensive_derivative(i, x);
  }
  return v;
}

HamiltonianSystem::Flow HamiltonianSystem::flow(double x, double p) const {
  // All reactions have |r_i| = 1, so group them by direction.
  const auto s = model_.split_rates(x);
  const double up = std::expm1(p);
  const double down = std::expm1(-p);
  const double h = up * s.birth + down * s.death;
  const double dx = std::exp(p) * s.birth - std::exp(-p) * s.death;
  const double dp = -(up * s.birth_dx + down * s.death_dx);
  return {dx, dp, p * dx - h};
}

double hamiltonian_value(const HamiltonianSystem& sys, double x, double p) {
  return sys.energy(x, p);
}

std::string_view to_string(ExitReason reason) {
  switch (reason) {
    case ExitReason::ReachedExitThreshold:
      return "ReachedExitThreshold";
    case ExitReason::LeftWindow:
      return "LeftWindow";
    case ExitReason::TimeCap:
      return "TimeCap";
    case ExitReason::StepFailure:
      return "StepFailure";
  }
  return "StepFailure";
}

std::optional<double> TrajectoryRecord::crossing_time(double level, int direction) const {
  for (const auto& c : crossings) {
    if (c.level == level && c.direction == direction) return c.t;
  }
  return std::nullopt;
}

namespace {

using State = std::array<double, 3>;  // x, p, S

enum class Terminal { None, Exit, Window };

Terminal classify(const State& y, const StopSpec& stop) {
  if (y[0] <= stop.x_exit) return Terminal::Exit;
  if (y[0] > stop.x_max || std::abs(y[1]) > stop.p_max_abs || !std::isfinite(y[0]) ||
      !std::isfinite(y[1])) {
    return Terminal::Window;
  }
  return Terminal::None;
}

}  // namespace

TrajectoryRecord integrate_orbit(const HamiltonianSystem& sys, double x0, double p0,
                                 const StopSpec& stop, double tol) {
  if (!(x0 > 0.0)) throw DomainError("integrate_orbit: x0 must be > 0");
  if (!std::isfinite(p0)) throw DomainError("integrate_orbit: p0 must be finite");
  if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) {
    throw DomainError("integrate_orbit: tol must lie in [1e-15, 1e-8]");
  }

  auto rhs = [&sys](double, const State& y, State& dydt) {
    const auto f = sys.flow(y[0], y[1]);
    dydt = {f.dx, f.dp, f.dS};
  };

  TrajectoryRecord rec;
  const double h0_energy = sys.energy(x0, p0);
  State y{x0, p0, 0.0};
  double t = 0.0;
  rec.samples.push_back({0.0, x0, p0, 0.0});

  auto finish = [&](ExitReason reason) {
    rec.exit_reason = reason;
    rec.flight_time = t;
    rec.final = {t, y[0], y[1], y[2]};
    if (rec.samples.back().t != t) rec.samples.push_back(rec.final);
    return rec;
  };

  if (const auto term = classify(y, stop); term != Terminal::None) {
    return finish(term == Terminal::Exit ? ExitReason::ReachedExitThreshold
                                         : ExitReason::LeftWindow);
  }

  double h = 1e-6;
  State y_next{}, err{};
  while (true) {
    if (rec.steps >= stop.max_steps) return finish(ExitReason::StepFailure);
    if (t >= stop.t_cap) return finish(ExitReason::TimeCap);
    bool capped = false;
    if (t + h >= stop.t_cap) {
      h = stop.t_cap - t;
      capped = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) return finish(ExitReason::StepFailure);

    rkf78::step(rhs, t, y, h, y_next, err);
    const double norm = rkf78::error_norm(y, y_next, err, tol);
    if (!(norm <= 1.0)) {
      ++rec.rejected;
      h *= std::isfinite(norm) ? rkf78::step_factor(norm) : 0.1;
      continue;
    }

    // Accepted step [t, t + h]. Look for the earliest terminal event inside.
    double h_event = h;
    Terminal terminal = classify(y_next, stop);
    if (terminal != Terminal::None) {
      double lo = 0.0, hi = h;
      State probe{};
      while (hi - lo > kEventTimeResolution) {
        const double mid = 0.5 * (lo + hi);
        rkf78::step(rhs, t, y, mid, probe, err);
        if (classify(probe, stop) != Terminal::None) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      h_event = hi;
      rkf78::step(rhs, t, y, h_event, y_next, err);
      terminal = classify(y_next, stop);
      if (terminal == Terminal::None) terminal = Terminal::Exit;  // cannot happen in practice
    }

    // Non-terminal level crossings inside [t, t + h_event].
    for (double level : stop.x_marks) {
      const double g0 = y[0] - level;
      const double g1 = y_next[0] - level;
      if ((g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0)) {
        const bool down = g0 > 0.0;
        double lo = 0.0, hi = h_event;
        State probe{};
        while (hi - lo > kEventTimeResolution) {
          const double mid = 0.5 * (lo + hi);
          rkf78::step(rhs, t, y, mid, probe, err);
          const double g = probe[0] - level;
          if (down ? g <= 0.0 : g >= 0.0) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        rec.crossings.push_back({level, t + hi, down ? -1 : +1});
      }
    }

    t += h_event;
    y = y_next;
    ++rec.steps;
    rec.energy_drift = std::max(rec.energy_drift, std::abs(sys.energy(y[0], y[1]) - h0_energy));
    if (stop.record_samples) rec.samples.push_back({t, y[0], y[1], y[2]});

    if (terminal == Terminal::Exit) return finish(ExitReason::ReachedExitThreshold);
    if (terminal == Terminal::Window) return finish(ExitReason::LeftWindow);
    if (capped) return finish(ExitReason::TimeCap);

    h *= rkf78::step_factor(norm);
  }
}

ModelSpec model_at_phi(const ModelSpec& model, double phi) {
  return model.with_epsilon(critical_params(model).eps_c + phi);
}

double flight_time(const HamiltonianSystem& sys, double x0, double p0, const FlightMode& mode,
                   const FlightOptions& options) {
  const double x_c = critical_params(sys.model()).x_c;
  StopSpec stop;
  stop.x_max = options.x_max_factor * x_c;
  stop.p_max_abs = options.p_max_abs;
  stop.t_cap = options.t_cap;
  stop.record_samples = false;

  if (const auto* decay = std::get_if<FullDecay>(&mode)) {
    if (!(decay->x_exit > 0.0 && decay->x_exit < x0)) {
      throw DomainError("flight_time: FullDecay needs 0 < x_exit < x0");
    }
    stop.x_exit = decay->x_exit;
    auto rec = integrate_orbit(sys, x0, p0, stop, options.tol);
    if (rec.exit_reason != ExitReason::ReachedExitThreshold) {
      throw NoTransitError(std::string("flight_time: orbit ended with ") +
                               std::string(to_string(rec.exit_reason)) +
                               " before reaching the exit threshold",
                           std::move(rec));
    }
    return rec.flight_time;
  }

  const double delta = std::get<BottleneckTransit>(mode).delta;
  if (!(delta > 0.0)) throw DomainError("flight_time: BottleneckTransit needs delta > 0");
  const double upper = x_c + delta;
  const double lower = x_c - delta;
  if (!(x0 > upper)) throw DomainError("flight_time: BottleneckTransit needs x0 > x_c + delta");
  if (!(lower > 0.0)) throw DomainError("flight_time: window reaches x <= 0");
  stop.x_exit = lower;
  stop.x_marks = {upper};
  auto rec = integrate_orbit(sys, x0, p0, stop, options.tol);
  const auto entry = rec.crossing_time(upper, -1);
  if (rec.exit_reason != ExitReason::ReachedExitThreshold || !entry) {
    throw NoTransitError("flight_time: orbit did not traverse the bottleneck window",
                         std::move(rec));
  }
  return rec.flight_time - *entry;
}

PathWeight path_weight(double action, double omega) {
  if (!(omega > 0.0)) throw DomainError("path_weight: omega must be > 0");
  PathWeight w{-omega * action + 0.0, std::nullopt};  // + 0.0 turns -0 into 0
  if (w.log_weight == 0.0) {
    w.weight = 1.0;
  } else if (w.log_weight >= std::log(1e-300)) {
    w.weight = std::exp(w.log_weight);
  }
  return w;
}

std::vector<PathWeightSample> weight_profile(const HamiltonianSystem& sys, double omega,
                                             std::span<const double> p0_grid, double x0,
                                             const WeightProfileOptions& options) {
  if (!(omega > 0.0)) throw DomainError("weight_profile: omega must be > 0");
  const double x_c = critical_params(sys.model()).x_c;
  StopSpec stop;
  stop.x_exit = options.exit_fraction * x_c;
  stop.x_max = options.flight.x_max_factor * x_c;
  stop.p_max_abs = options.flight.p_max_abs;
  stop.t_cap = options.flight.t_cap;
  stop.record_samples = false;

  std::vector<PathWeightSample> out;
  out.reserve(p0_grid.size());
  for (double p0 : p0_grid) {
    try {
      const auto rec = integrate_orbit(sys, x0, p0, stop, options.flight.tol);
      const auto w = path_weight(rec.final.S, omega);
      out.push_back({p0, rec.final.S, w.log_weight, w.weight, omega, rec.exit_reason,
                     rec.flight_time, false});
    } catch (const std::exception&) {
      out.push_back({p0, 0.0, 0.0, std::nullopt, omega, ExitReason::StepFailure, 0.0, true});
    }
  }
  return out;
}

}  // namespace ghost
