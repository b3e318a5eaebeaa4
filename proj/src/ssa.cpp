#include "ghost/ssa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ghost/errors.hpp"
#include "ghost/parallel.hpp"
#include "ghost/rng.hpp"
#include "ghost/stats.hpp"

namespace ghost {

void SsaRunConfig::validate() const {
  if (omega <= 0) throw ConfigError("ssa: omega must be a positive integer");
  if (!(x0_fraction > 0.0)) throw ConfigError("ssa: x0_fraction must be > 0");
  if (!(t_max > 0.0)) throw ConfigError("ssa: t_max must be > 0");
  if (n_replicates < 1) throw ConfigError("ssa: n_replicates must be >= 1");
  if (!(x_cap_factor > 0.0)) throw ConfigError("ssa: x_cap_factor must be > 0");
}

std::int64_t SsaRunConfig::initial_count() const {
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  return static_cast<std::int64_t>(std::nearbyint(x0_fraction * static_cast<double>(omega)));
}

std::int64_t SsaRunConfig::count_cap() const {
  return static_cast<std::int64_t>(x_cap_factor * static_cast<double>(omega));
}

double ExtinctionStats::censored_fraction() const {
  return samples.empty() ? 0.0
                         : static_cast<double>(n_censored) / static_cast<double>(samples.size());
}

ExtinctionStats summarize(std::vector<ExtinctionSample> samples) {
  ExtinctionStats stats;
  RunningStats acc;
  for (const auto& s : samples) {
    if (s.censored) {
      ++stats.n_censored;
    } else {
      acc.add(s.time);
    }
  }
  stats.samples = std::move(samples);
  stats.mean = acc.mean();
  stats.sem = acc.sem();
  stats.usable = acc.count() > 0;
  stats.degenerate = acc.count() < 2;
  return stats;
}

ExtinctionSample simulate_from(const ModelSpec& model, const SsaRunConfig& cfg,
                               std::int64_t start_count, std::uint64_t replicate) {
  if (start_count < 0) throw DomainError("ssa: starting count must be >= 0");
  const std::size_t n_reactions = model.reactions().size();
  if (n_reactions > 16) throw ConfigError("ssa: at most 16 reactions are supported");

  std::array<double, 16> propensity{};
  std::array<int, 16> step{};
  for (std::size_t i = 0; i < n_reactions; ++i) step[i] = model.reactions()[i].step;

  const double omega = static_cast<double>(cfg.omega);
  const std::int64_t cap = cfg.count_cap();
  ReplicateStream rng(cfg.seed, replicate);

  std::int64_t count = start_count;
  double t = 0.0;
  while (count > 0) {
    model.fill_propensities(count, omega, std::span(propensity.data(), n_reactions));
    double total = 0.0;
    for (std::size_t i = 0; i < n_reactions; ++i) total += propensity[i];
    if (!(total > 0.0)) {
      // Stuck in a non-absorbing state with no outgoing transition.
      return {cfg.t_max, true};
    }
    t += rng.exponential(total);
    if (t >= cfg.t_max) return {cfg.t_max, true};

    const double target = rng.open_unit() * total;
    double cumulative = 0.0;
    std::size_t chosen = n_reactions - 1;
    for (std::size_t i = 0; i < n_reactions; ++i) {
      cumulative += propensity[i];
      if (target < cumulative) {
        chosen = i;
        break;
      }
    }
    // Skip zero-propensity reactions that round-off could select at the tail.
    while (propensity[chosen] <= 0.0 && chosen > 0) --chosen;
    count += step[chosen];
    if (count > cap) {
      throw PopulationExplosionError("ssa: population exceeded the hard cap X_max = " +
                                     std::to_string(cap));
    }
  }
  return {t, false};
}

ExtinctionSample simulate_to_extinction(const ModelSpec& model, const SsaRunConfig& cfg,
                                        std::uint64_t replicate) {
  cfg.validate();
  return simulate_from(model, cfg, cfg.initial_count(), replicate);
}

ExtinctionStats mean_extinction_time(const ModelSpec& model, const SsaRunConfig& cfg) {
  cfg.validate();
  std::vector<ExtinctionSample> samples(cfg.n_replicates);
  const std::int64_t start = cfg.initial_count();
  parallel_for(
      cfg.n_replicates,
      [&](std::size_t i) { samples[i] = simulate_from(model, cfg, start, i); }, cfg.threads);
  return summarize(std::move(samples));
}

namespace {

double extinct_fraction(const ModelSpec& model, double epsilon, const SsaRunConfig& cfg) {
  const auto stats = mean_extinction_time(model.with_epsilon(epsilon), cfg);
  return 1.0 - stats.censored_fraction();
}

void resmooth(std::vector<BifurcationProbe>& probes) {
  std::sort(probes.begin(), probes.end(),
            [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
  std::vector<double> raw;
  raw.reserve(probes.size());
  for (const auto& p : probes) raw.push_back(p.extinct_fraction);
  const auto fit = isotonic_increasing(raw);
  for (std::size_t i = 0; i < probes.size(); ++i) probes[i].smoothed = fit[i];
}

// Index i such that smoothed[i] < 1/2 <= smoothed[i+1].
std::size_t find_bracket(const std::vector<BifurcationProbe>& probes) {
  if (probes.front().smoothed >= 0.5 || probes.back().smoothed < 0.5) {
    throw BracketError("stochastic bifurcation: extinct fraction does not cross 1/2 on the grid");
  }
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    if (probes[i].smoothed < 0.5 && probes[i + 1].smoothed >= 0.5) return i;
  }
  throw BracketError("stochastic bifurcation: no crossing found");
}

}  // namespace

StochasticBifurcation estimate_stochastic_bifurcation(const ModelSpec& model,
                                                      std::span<const double> probe_grid,
                                                      const SsaRunConfig& cfg,
                                                      const BifurcationOptions& options) {
  cfg.validate();
  if (probe_grid.size() < 2) {
    throw BracketError("stochastic bifurcation: probe grid needs at least two points");
  }
  std::vector<BifurcationProbe> probes;
  for (double eps : probe_grid) {
    if (!(eps > 0.0)) throw ConfigError("stochastic bifurcation: probe epsilons must be > 0");
    probes.push_back({eps, extinct_fraction(model, eps, cfg), 0.0});
  }
  resmooth(probes);
  std::size_t i = find_bracket(probes);

  for (std::size_t step = 0; step < options.bisection_steps; ++step) {
    const double mid = 0.5 * (probes[i].epsilon + probes[i + 1].epsilon);
    probes.push_back({mid, extinct_fraction(model, mid, cfg), 0.0});
    resmooth(probes);
    i = find_bracket(probes);
  }

  const auto& lo = probes[i];
  const auto& hi = probes[i + 1];
  const double span = hi.smoothed - lo.smoothed;
  const double w = span > 0.0 ? (0.5 - lo.smoothed) / span : 0.5;
  StochasticBifurcation out;
  out.eps_bar_s = lo.epsilon + w * (hi.epsilon - lo.epsilon);
  out.uncertainty = 0.5 * (hi.epsilon - lo.epsilon);
  out.probes = std::move(probes);
  return out;
}

ScalingCurve sweep_extinction_times(const ModelSpec& model, double eps_bar_s,
                                    std::span<const double> phi_s_grid, const SsaRunConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < phi_s_grid.size(); ++i) {
    if (!(phi_s_grid[i] > 0.0)) throw ConfigError("ssa sweep: phi_s grid values must be > 0");
    if (i > 0 && !(phi_s_grid[i] > phi_s_grid[i - 1])) {
      throw ConfigError("ssa sweep: phi_s grid must be strictly increasing");
    }
  }
  ScalingCurve curve;
  curve.provenance = Provenance::SSA;
  curve.model = model.name();
  curve.omega = static_cast<double>(cfg.omega);
  curve.ensemble = "x0_fraction=" + std::to_string(cfg.x0_fraction) +
                   " replicates=" + std::to_string(cfg.n_replicates) +
                   " eps_bar_s=" + std::to_string(eps_bar_s);
  for (double phi : phi_s_grid) {
    const auto stats = mean_extinction_time(model.with_epsilon(eps_bar_s + phi), cfg);
    if (!stats.usable || !(stats.mean > 0.0)) {
      curve.empty_phis.push_back(phi);
      continue;
    }
    curve.points.push_back({phi, stats.mean, stats.sem, stats.n_uncensored(), stats.n_censored,
                            stats.censored_fraction() > kMaxCensoredFraction});
  }
  return curve;
}

}  // namespace ghost
