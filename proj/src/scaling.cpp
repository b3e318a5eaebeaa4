#include "ghost/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ghost/errors.hpp"
#include "ghost/parallel.hpp"
#include "ghost/phase_curves.hpp"
#include "ghost/stats.hpp"

namespace ghost {

InitialConditionEnsemble InitialConditionEnsemble::explicit_p0(std::vector<double> p0s) {
  InitialConditionEnsemble e;
  e.p0_values = std::move(p0s);
  return e;
}

void InitialConditionEnsemble::validate() const {
  if (!(x0_factor > 0.0)) throw ConfigError("ensemble: x0_factor must be > 0");
  if (p0_values.empty() && n_p0 == 0) throw ConfigError("ensemble: no initial momenta");
  if (!(p_span_max > 0.0)) throw ConfigError("ensemble: p_span_max must be > 0");
  if (!(weight_threshold >= 0.0 && weight_threshold <= 1.0)) {
    throw ConfigError("ensemble: weight_threshold must lie in [0, 1]");
  }
  if (!(reference_omega > 0.0)) throw ConfigError("ensemble: reference_omega must be > 0");
  if (bottleneck ? !(delta > 0.0) : !(exit_fraction > 0.0 && exit_fraction < x0_factor)) {
    throw ConfigError("ensemble: invalid exit window");
  }
  for (double p : p0_values) {
    if (!std::isfinite(p)) throw ConfigError("ensemble: p0 values must be finite");
  }
}

std::vector<double> InitialConditionEnsemble::p0_grid(const ModelSpec& model) const {
  if (!p0_values.empty()) return p0_values;
  const double p_min_p = phase_curves(model, model.epsilon(), {}).p_min_p;
  double span = std::min(p_span_max, std::abs(p_min_p));
  if (!(span > 0.0)) span = p_span_max;
  std::vector<double> grid(n_p0);
  for (std::size_t i = 0; i < n_p0; ++i) {
    grid[i] = -span + span * static_cast<double>(i) / static_cast<double>(n_p0);
  }
  return grid;
}

std::string InitialConditionEnsemble::describe() const {
  std::ostringstream os;
  os << "x0=" << x0_factor << "*x_c ";
  if (p0_values.empty()) {
    os << "p0=" << n_p0 << " uniform in [-min(" << p_span_max << ",|p_min_p|),0)";
  } else {
    os << "p0={";
    for (std::size_t i = 0; i < p0_values.size(); ++i) os << (i ? "," : "") << p0_values[i];
    os << "}";
  }
  os << " weight>=" << weight_threshold << "@omega=" << reference_omega;
  if (bottleneck) {
    os << " window=+-" << delta;
  } else {
    os << " exit=" << exit_fraction << "*x_c";
  }
  return os.str();
}

OrbitOutcome ensemble_orbit(const HamiltonianSystem& sys, double p0,
                            const InitialConditionEnsemble& ensemble) {
  const double x_c = critical_params(sys.model()).x_c;
  const double x0 = ensemble.x0_factor * x_c;
  StopSpec stop;
  stop.x_max = ensemble.flight.x_max_factor * x_c;
  stop.p_max_abs = ensemble.flight.p_max_abs;
  stop.t_cap = ensemble.flight.t_cap;
  stop.record_samples = false;
  if (ensemble.bottleneck) {
    stop.x_exit = x_c - ensemble.delta;
    stop.x_marks = {x_c + ensemble.delta};
  } else {
    stop.x_exit = ensemble.exit_fraction * x_c;
  }

  const auto rec = integrate_orbit(sys, x0, p0, stop, ensemble.flight.tol);
  OrbitOutcome out{};
  out.p0 = p0;
  out.action = rec.final.S;
  out.log_weight = path_weight(rec.final.S, ensemble.reference_omega).log_weight;
  out.exit_reason = rec.exit_reason;
  out.reached_exit = rec.exit_reason == ExitReason::ReachedExitThreshold;
  out.flight_time = rec.flight_time;
  if (ensemble.bottleneck && out.reached_exit) {
    const auto entry = rec.crossing_time(x_c + ensemble.delta, -1);
    out.reached_exit = entry.has_value();
    if (entry) out.flight_time = rec.flight_time - *entry;
  }
  const double log_threshold =
      ensemble.weight_threshold > 0.0 ? std::log(ensemble.weight_threshold)
                                      : -std::numeric_limits<double>::infinity();
  out.kept = out.reached_exit && out.log_weight >= log_threshold;
  return out;
}

namespace {

void require_phi_grid(std::span<const double> phi_grid) {
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    if (!(phi_grid[i] > 0.0)) throw ConfigError("phi grid values must be > 0");
    if (i > 0 && !(phi_grid[i] > phi_grid[i - 1])) {
      throw ConfigError("phi grid must be strictly increasing");
    }
  }
}

}  // namespace

ScalingCurve flight_time_sweep(const ModelSpec& model, std::span<const double> phi_grid,
                               const InitialConditionEnsemble& ensemble, std::size_t threads) {
  ensemble.validate();
  require_phi_grid(phi_grid);

  struct Task {
    std::size_t phi_index;
    double p0;
  };
  std::vector<HamiltonianSystem> systems;
  std::vector<Task> tasks;
  systems.reserve(phi_grid.size());
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    systems.emplace_back(model_at_phi(model, phi_grid[i]));
    for (double p0 : ensemble.p0_grid(systems.back().model())) tasks.push_back({i, p0});
  }

  std::vector<OrbitOutcome> outcomes(tasks.size());
  parallel_for(
      tasks.size(),
      [&](std::size_t t) {
        outcomes[t] = ensemble_orbit(systems[tasks[t].phi_index], tasks[t].p0, ensemble);
      },
      threads);

  ScalingCurve curve;
  curve.provenance = Provenance::HamiltonianEnsemble;
  curve.model = model.name();
  curve.ensemble = ensemble.describe();
  std::vector<RunningStats> acc(phi_grid.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (outcomes[t].kept) acc[tasks[t].phi_index].add(outcomes[t].flight_time);
  }
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    if (acc[i].count() == 0) {
      curve.empty_phis.push_back(phi_grid[i]);
      continue;
    }
    curve.points.push_back({phi_grid[i], acc[i].mean(), acc[i].stddev(), acc[i].count()});
  }
  return curve;
}

SlopeFit fit_loglog_slope(const ScalingCurve& curve, double phi_lo, double phi_hi) {
  if (!(phi_lo > 0.0) || !(phi_hi >= phi_lo)) {
    throw ConfigError("fit window must satisfy 0 < phi_lo <= phi_hi");
  }
  const double lo = phi_lo * (1.0 - 1e-9);
  const double hi = phi_hi * (1.0 + 1e-9);
  std::vector<double> lx, ly;
  for (const auto& pt : curve.points) {
    if (pt.phi >= lo && pt.phi <= hi) {
      if (!(pt.phi > 0.0) || !(pt.value > 0.0)) {
        throw ConfigError("log-log fit needs positive phi and values");
      }
      lx.push_back(std::log(pt.phi));
      ly.push_back(std::log(pt.value));
    }
  }
  if (lx.size() < 4) {
    throw WindowError("log-log fit needs at least 4 points in the window, got " +
                      std::to_string(lx.size()));
  }
  const auto fit = ordinary_least_squares(lx, ly);
  return {fit.slope, fit.intercept, fit.slope_stderr, phi_lo, phi_hi, fit.r_squared, lx.size()};
}

AppendixRoots appendix_roots(double phi) {
  if (!(phi > 0.0 && phi <= kAppendixPhiMax)) {
    throw DomainError("appendix_roots: phi must lie in (0, 1/12]");
  }
  const double root = std::sqrt(1.0 + 8.0 * phi);
  AppendixRoots r;
  r.phi = phi;
  r.p_minus = (-1.0 - root) / 4.0;
  // (-1 + root) / 4 rewritten without cancellation for small phi.
  r.p_plus = 2.0 * phi / (1.0 + root);
  r.c1 = std::sqrt(-r.p_minus);
  r.y_plus = {0.0, std::sqrt(phi)};
  r.y_minus = {0.0, -std::sqrt(phi)};
  return r;
}

namespace {

using boost::math::quadrature::gauss_kronrod;

// Location of the smallest |f| on [lo, hi] by a fine scan and golden-section
// refinement.
double argmin_abs(const std::function<double(double)>& f, double lo, double hi) {
  const int n = 2000;
  int best = 0;
  double best_value = std::abs(f(lo));
  for (int i = 1; i <= n; ++i) {
    const double v = std::abs(f(lo + (hi - lo) * i / n));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / n;
  double b = lo + (hi - lo) * std::min(best + 1, n) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  // capped: near machine resolution the bracket can stop shrinking
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (std::abs(f(c)) < std::abs(f(d))) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

double integrate_piece(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  double error = 0.0;
  // The Kronrod error estimate bottoms out near 1e-9 relative on the pinch
  // pieces (cancellation in dx/dt); a tighter target makes it chase noise.
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-9, &error);
}

}  // namespace

double transit_time_between(const ModelSpec& model, double phi, double p_fixed, double x_from,
                            double x_to) {
  if (!(x_to > 0.0 && x_from > x_to)) {
    throw DomainError("transit_time_between: need 0 < x_to < x_from");
  }
  const HamiltonianSystem sys(model_at_phi(model, phi));
  const std::function<double(double)> velocity = [&](double x) {
    return sys.flow(x, p_fixed).dx;
  };

  // The orbit moves down, so dx/dt must stay strictly negative.
  const double pinch = argmin_abs(velocity, x_to, x_from);
  const double v_min = velocity(pinch);
  if (!(v_min < 0.0) || !(velocity(x_to) < 0.0) || !(velocity(x_from) < 0.0)) {
    throw PoleError("transit_time_between: dx/dt vanishes or changes sign on the segment");
  }

  const std::function<double(double)> integrand = [&](double x) { return -1.0 / velocity(x); };
  // Geometric breakpoints around the bottleneck resolve its peak, which is
  // about sqrt(phi) wide.
  double total = 0.0;
  auto side = [&](double from, double to) {
    const double length = std::abs(to - from);
    if (length == 0.0) return;
    const double dir = to > from ? 1.0 : -1.0;
    double inner = 0.0;
    // Narrower first pieces would put the Kronrod nodes at the resolution of x.
    double outer = std::min(length, 1e-4 * std::max(1.0, std::abs(from)));
    while (true) {
      const double a = from + dir * inner;
      const double b = from + dir * outer;
      total += integrate_piece(integrand, std::min(a, b), std::max(a, b));
      if (outer >= length) break;
      inner = outer;
      outer = std::min(length, outer * 4.0);
    }
  };
  side(pinch, x_from);
  side(pinch, x_to);
  if (!std::isfinite(total)) throw PoleError("transit_time_between: integral diverges");
  return total;
}

double transit_time_quadrature(const ModelSpec& model, double phi, double p_fixed, double delta) {
  if (!(delta > 0.0)) throw DomainError("transit_time_quadrature: delta must be > 0");
  const double x_c = critical_params(model).x_c;
  if (!(x_c - delta > 0.0)) throw DomainError("transit_time_quadrature: window reaches x <= 0");
  return transit_time_between(model, phi, p_fixed, x_c + delta, x_c - delta);
}

BendLocation bend_location(const ScalingCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < kPlateauPoints + kDecayFitPoints - 1) {
    throw RegimeError("bend_location: curve too short for a plateau and a decay window");
  }
  std::vector<double> low;
  for (std::size_t i = 0; i < kPlateauPoints; ++i) low.push_back(pts[i].value);
  std::sort(low.begin(), low.end());
  const double plateau = low[kPlateauPoints / 2];

  // First index from which the curve stays below the departure level.
  const double level = kDepartureFraction * plateau;
  std::size_t departure = pts.size();
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (pts[i].value < level) {
      departure = i;
    } else {
      break;
    }
  }
  if (departure == pts.size()) throw RegimeError("bend_location: curve never leaves its plateau");
  if (departure < kPlateauPoints / 2 + 1) {
    throw RegimeError("bend_location: no plateau before the decay");
  }
  if (departure + kDecayFitPoints > pts.size()) {
    throw RegimeError("bend_location: fewer than 4 points in the decay window");
  }
  // Everything before the departure must actually be flat; a curve that
  // decays from the start would otherwise pass the level test.
  std::vector<double> log_phi, log_value;
  for (std::size_t i = 0; i < departure; ++i) {
    log_phi.push_back(std::log(pts[i].phi));
    log_value.push_back(std::log(pts[i].value));
  }
  if (std::abs(ordinary_least_squares(log_phi, log_value).slope) >= kPlateauMaxSlope) {
    throw RegimeError("bend_location: no plateau before the decay");
  }

  ScalingCurve window;
  window.points.assign(pts.begin() + static_cast<std::ptrdiff_t>(departure),
                       pts.begin() + static_cast<std::ptrdiff_t>(departure + kDecayFitPoints));
  const auto fit =
      fit_loglog_slope(window, window.points.front().phi, window.points.back().phi);
  if (!(fit.slope < 0.0)) throw RegimeError("bend_location: decay window is not decreasing");
  const double phi_bend = std::exp((std::log(plateau) - fit.intercept) / fit.slope);
  return {phi_bend, plateau, departure, fit};
}

double collapse_objective(std::span<const ScalingCurve> curves, double a, double b,
                          std::size_t min_overlap_points) {
  double u_lo = -std::numeric_limits<double>::infinity();
  double u_hi = std::numeric_limits<double>::infinity();
  struct Point {
    double u, v;
  };
  std::vector<std::vector<Point>> mapped;
  for (const auto& c : curves) {
    const double log_omega = std::log(*c.omega);
    std::vector<Point> m;
    for (const auto& pt : c.points) {
      m.push_back({std::log(pt.phi) + a * log_omega, std::log(pt.value) + b * log_omega});
    }
    if (m.empty()) return std::numeric_limits<double>::infinity();
    u_lo = std::max(u_lo, m.front().u);
    u_hi = std::min(u_hi, m.back().u);
    mapped.push_back(std::move(m));
  }
  if (!(u_lo <= u_hi)) return std::numeric_limits<double>::infinity();

  for (const auto& m : mapped) {
    std::size_t used = 0;
    for (const auto& p : m) used += (p.u >= u_lo && p.u <= u_hi) ? 1 : 0;
    if (used < min_overlap_points) return std::numeric_limits<double>::infinity();
  }

  // Each point in the common range against the piecewise-linear interpolant
  // of every other curve.
  auto interpolate = [](const std::vector<Point>& m, double u) {
    const auto hi = std::lower_bound(m.begin(), m.end(), u,
                                     [](const Point& p, double x) { return p.u < x; });
    if (hi == m.begin()) return hi->v;
    if (hi == m.end()) return std::prev(hi)->v;
    const auto lo = std::prev(hi);
    const double w = (u - lo->u) / (hi->u - lo->u);
    return lo->v + w * (hi->v - lo->v);
  };
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    for (const auto& p : mapped[i]) {
      if (p.u < u_lo || p.u > u_hi) continue;
      for (std::size_t j = 0; j < mapped.size(); ++j) {
        if (j == i) continue;
        const double d = p.v - interpolate(mapped[j], p.u);
        sum += d * d;
        ++count;
      }
    }
  }
  return sum / static_cast<double>(count);
}

CollapseFit collapse_fit(std::span<const ScalingCurve> curves, const CollapseOptions& options) {
  if (curves.size() < 2) throw ConfigError("collapse_fit: needs at least two curves");
  std::vector<double> omegas;
  for (const auto& c : curves) {
    if (!c.omega || !(*c.omega > 0.0)) throw ConfigError("collapse_fit: every curve needs omega");
    if (std::find(omegas.begin(), omegas.end(), *c.omega) != omegas.end()) {
      throw ConfigError("collapse_fit: omegas must be distinct");
    }
    c.validate();
    omegas.push_back(*c.omega);
  }
  if (options.grid < 2 || !(options.a_hi > options.a_lo) || !(options.b_hi > options.b_lo)) {
    throw ConfigError("collapse_fit: invalid search box");
  }

  auto objective = [&](double a, double b) {
    return collapse_objective(curves, a, b, options.min_overlap_points);
  };
  CollapseFit best{0.0, 0.0, objective(0.0, 0.0), 0.0, omegas};
  best.objective_at_origin = best.objective;

  auto scan = [&](double a_lo, double a_hi, double b_lo, double b_hi) {
    const std::size_t n = options.grid;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = a_lo + (a_hi - a_lo) * static_cast<double>(i) / (n - 1);
      for (std::size_t j = 0; j < n; ++j) {
        const double b = b_lo + (b_hi - b_lo) * static_cast<double>(j) / (n - 1);
        const double f = objective(a, b);
        if (f < best.objective) {
          best.a = a;
          best.b = b;
          best.objective = f;
        }
      }
    }
  };
  scan(options.a_lo, options.a_hi, options.b_lo, options.b_hi);
  if (!std::isfinite(best.objective)) {
    throw OverlapError("collapse_fit: rescaled curves never overlap inside the search box");
  }
  double half_a = (options.a_hi - options.a_lo) / static_cast<double>(options.grid - 1);
  double half_b = (options.b_hi - options.b_lo) / static_cast<double>(options.grid - 1);
  for (std::size_t r = 0; r < options.refinements; ++r) {
    scan(best.a - half_a, best.a + half_a, best.b - half_b, best.b + half_b);
    half_a *= 0.2;
    half_b *= 0.2;
  }
  return best;
}

}  // namespace ghost
