#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ghost/curve.hpp"
#include "ghost/model.hpp"

namespace ghost {

struct SsaRunConfig {
  std::int64_t omega = 500;
  double x0_fraction = 0.75;
  double t_max = 1e6;  // censoring horizon
  std::uint64_t seed = 1;
  std::size_t n_replicates = 100;
  double x_cap_factor = 10.0;  // hard cap X_max = x_cap_factor * omega
  std::size_t threads = 0;     // 0 = default_thread_count()

  // Throws ConfigError on invalid values.
  void validate() const;
  // round-half-to-even(x0_fraction * omega)
  std::int64_t initial_count() const;
  std::int64_t count_cap() const;
};

struct ExtinctionSample {
  double time;
  bool censored;
};

struct ExtinctionStats {
  std::vector<ExtinctionSample> samples;
  double mean = 0.0;
  double sem = 0.0;
  std::size_t n_censored = 0;
  bool usable = true;      // false when every sample was censored
  bool degenerate = false; // fewer than two uncensored samples: sem reported as 0

  std::size_t n_uncensored() const { return samples.size() - n_censored; }
  double censored_fraction() const;
};

// Mean and SEM of the uncensored samples (one pass, in sample order).
ExtinctionStats summarize(std::vector<ExtinctionSample> samples);

// One Gillespie direct-method run from X(0) = cfg.initial_count(). Returns the
// first-passage time to X = 0, or (t_max, censored). The random stream depends
// only on (cfg.seed, replicate). Throws PopulationExplosionError when X exceeds
// cfg.count_cap().
ExtinctionSample simulate_to_extinction(const ModelSpec& model, const SsaRunConfig& cfg,
                                        std::uint64_t replicate);

// Same, from an explicit starting count.
ExtinctionSample simulate_from(const ModelSpec& model, const SsaRunConfig& cfg,
                               std::int64_t start_count, std::uint64_t replicate);

// cfg.n_replicates independent runs (possibly concurrent); the result does
// not depend on the worker count.
ExtinctionStats mean_extinction_time(const ModelSpec& model, const SsaRunConfig& cfg);

struct BifurcationProbe {
  double epsilon;
  double extinct_fraction;  // raw fraction extinct before t_max
  double smoothed;          // isotonic (nondecreasing in epsilon) fit
};

struct StochasticBifurcation {
  double eps_bar_s;
  double uncertainty;  // half width of the final bracket
  std::vector<BifurcationProbe> probes;  // sorted by epsilon

  double phi_s(double epsilon) const { return epsilon - eps_bar_s; }
};

struct BifurcationOptions {
  // Midpoint refinements of the initial grid bracket.
  std::size_t bisection_steps = 3;
};

// eps_bar^(s): the epsilon at which the fraction of replicates extinct within
// cfg.t_max crosses 1/2. Fractions are smoothed by isotonic regression; the
// crossing is bracketed on the grid, refined by bisection and located by
// linear interpolation inside the final bracket. Throws BracketError when the
// grid has fewer than two points or does not bracket the crossing.
StochasticBifurcation estimate_stochastic_bifurcation(const ModelSpec& model,
                                                      std::span<const double> probe_grid,
                                                      const SsaRunConfig& cfg,
                                                      const BifurcationOptions& options = {});

// SSA extinction-time curve over phi_s = epsilon - eps_bar_s. Points with more
// than 10% censored samples are flagged; points with no uncensored sample go
// to empty_phis. Throws ConfigError for phi_s <= 0.
ScalingCurve sweep_extinction_times(const ModelSpec& model, double eps_bar_s,
                                    std::span<const double> phi_s_grid, const SsaRunConfig& cfg);

inline constexpr double kMaxCensoredFraction = 0.10;

}  // namespace ghost
