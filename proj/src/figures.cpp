#include "ghost/figures.hpp"

#include <chrono>

#include "ghost/errors.hpp"
#include "ghost/hamiltonian.hpp"
#include "ghost/io.hpp"
#include "ghost/phase_curves.hpp"
#include "ghost/scaling.hpp"
#include "ghost/ssa.hpp"

#ifndef GHOST_SCALER_VERSION
#define GHOST_SCALER_VERSION "0.0.0"
#endif

namespace ghost {

using nlohmann::json;

std::string version() { return GHOST_SCALER_VERSION; }

json ExperimentManifest::to_json() const {
  json stage_list = json::array();
  for (const auto& s : stages) stage_list.push_back({{"stage", s.name}, {"seconds", s.seconds}});
  json output_list = json::array();
  for (const auto& o : outputs) output_list.push_back({{"file", o.file}, {"sha256", o.sha256}});
  json j = {{"tool", "ghost-scaler"},
            {"version", version},
            {"seed", seed},
            {"status", status},
            {"config", config},
            {"wall_seconds", wall_seconds},
            {"stages", stage_list},
            {"outputs", output_list},
            {"results", results}};
  if (!error.empty()) j["error"] = error;
  return j;
}

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const std::filesystem::path& out_dir, const std::string& name, const CsvTable& table,
          ExperimentManifest& manifest) {
  const std::string content = table.to_string();
  write_text(out_dir / name, content);
  manifest.outputs.push_back({name, sha256_hex(content)});
}

void append(CsvTable& into, const CsvTable& rows) {
  if (into.header.empty()) into.header = rows.header;
  into.rows.insert(into.rows.end(), rows.rows.begin(), rows.rows.end());
}

ModelSpec build_model(const ExperimentConfig& config, const std::string& name) {
  ModelParams p = config.params;
  p.epsilon = 1.0;
  ModelSpec base = ModelSpec::by_name(name, p);
  return base.with_epsilon(critical_params(base).eps_c);
}

json points_summary(const ScalingCurve& curve) {
  json flagged = json::array();
  for (const auto& p : curve.points) {
    if (p.flagged) flagged.push_back(p.phi);
  }
  return {{"points", curve.points.size()},
          {"empty_phis", curve.empty_phis},
          {"flagged_phis", flagged},
          {"ensemble", curve.ensemble}};
}

}  // namespace

void run_figure1(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                 ExperimentManifest& manifest) {
  const auto phi_s = parse_grid(config.phi_s_grid);
  const auto phi = parse_grid(config.phi_grid);
  const auto offsets = parse_grid(config.probe_offsets);

  CsvTable top, bottom;
  for (const auto& name : config.models) {
    const ModelSpec model = build_model(config, name);
    const double eps_c = critical_params(model).eps_c;
    json& result = manifest.results["figure1"][name];

    Stopwatch probe_clock;
    SsaRunConfig probe_cfg;
    probe_cfg.omega = config.omega;
    probe_cfg.x0_fraction = config.x0_fraction;
    probe_cfg.t_max = config.probe_t_max;
    probe_cfg.seed = config.seed;
    probe_cfg.n_replicates = config.probe_replicates;
    probe_cfg.threads = config.threads;
    std::vector<double> probes;
    for (double o : offsets) probes.push_back(eps_c + o);
    BifurcationOptions options;
    options.bisection_steps = config.bisection_steps;
    const auto bif = estimate_stochastic_bifurcation(model, probes, probe_cfg, options);
    manifest.stages.push_back({"fig1/" + name + "/bifurcation", probe_clock.seconds()});
    result["eps_c"] = eps_c;
    result["eps_bar_s"] = bif.eps_bar_s;
    result["eps_bar_s_uncertainty"] = bif.uncertainty;

    Stopwatch ssa_clock;
    SsaRunConfig cfg = probe_cfg;
    cfg.t_max = config.t_max;
    cfg.n_replicates = config.replicates;
    const auto ssa_curve = sweep_extinction_times(model, bif.eps_bar_s, phi_s, cfg);
    manifest.stages.push_back({"fig1/" + name + "/ssa_sweep", ssa_clock.seconds()});
    append(top, curve_table(ssa_curve));
    result["ssa"] = points_summary(ssa_curve);

    Stopwatch flight_clock;
    InitialConditionEnsemble ensemble = config.ensemble;
    ensemble.flight.tol = config.tol;
    const auto flight = flight_time_sweep(model, phi, ensemble, config.threads);
    manifest.stages.push_back({"fig1/" + name + "/flight_sweep", flight_clock.seconds()});
    append(bottom, curve_table(flight));
    result["flight"] = points_summary(flight);
  }
  emit(out_dir, "fig1_top.csv", top, manifest);
  emit(out_dir, "fig1_bottom.csv", bottom, manifest);
}

void run_figure2(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                 ExperimentManifest& manifest) {
  const auto x_grid = parse_grid(config.fig2_x_grid);
  Stopwatch clock;
  for (const auto& name : config.models) {
    const ModelSpec model = build_model(config, name);
    const double eps_c = critical_params(model).eps_c;
    for (std::size_t i = 0; i < config.fig2_offsets.size(); ++i) {
      const double eps = eps_c + config.fig2_offsets[i];
      if (!(eps > 0.0)) throw ConfigError("figure2: epsilon offset gives epsilon <= 0");
      const auto curves = phase_curves(model, eps, x_grid);
      const std::string file = "fig2_" + name + "_" + std::to_string(i) + ".csv";
      emit(out_dir, file, phase_curves_table(curves), manifest);
      json entry = {{"file", file},
                    {"epsilon", eps},
                    {"x_min_H", curves.x_min_H},
                    {"p_min_H", curves.p_min_H},
                    {"x_min_p", curves.x_min_p},
                    {"p_min_p", curves.p_min_p}};
      entry["x_F"] = curves.x_F ? json(*curves.x_F) : json(nullptr);
      entry["x_0"] = curves.x_0 ? json(*curves.x_0) : json(nullptr);
      manifest.results["figure2"][name].push_back(entry);
    }
  }
  manifest.stages.push_back({"fig2", clock.seconds()});
}

void run_figure3(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                 ExperimentManifest& manifest) {
  const auto p0_grid = parse_grid(config.fig3_p0_grid);
  Stopwatch clock;
  WeightProfileOptions options;
  options.flight = config.ensemble.flight;
  options.flight.tol = config.tol;
  options.exit_fraction = config.ensemble.exit_fraction;
  for (const auto& name : config.models) {
    const ModelSpec model = build_model(config, name);
    const double x_c = critical_params(model).x_c;
    for (std::size_t i = 0; i < config.fig3_phis.size(); ++i) {
      const double phi = config.fig3_phis[i];
      const HamiltonianSystem sys(model_at_phi(model, phi));
      const auto samples = weight_profile(sys, config.fig3_omega, p0_grid,
                                          config.ensemble.x0_factor * x_c, options);
      const std::string file = "fig3_" + name + "_" + std::to_string(i) + ".csv";
      emit(out_dir, file, weights_table(samples), manifest);
      manifest.results["figure3"][name].push_back(
          {{"file", file}, {"phi", phi}, {"omega", config.fig3_omega}});
    }
  }
  manifest.stages.push_back({"fig3", clock.seconds()});
}

ExperimentManifest run_figures(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                               const std::vector<int>& figures) {
  config.validate();
  for (int f : figures) {
    if (f < 1 || f > 3) throw ConfigError("unknown figure " + std::to_string(f));
  }
  ExperimentManifest manifest;
  manifest.config = config;
  manifest.seed = config.seed;
  manifest.version = version();
  Stopwatch wall;
  auto write_manifest = [&] {
    manifest.wall_seconds = wall.seconds();
    write_text(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  };
  try {
    for (int f : figures) {
      if (f == 1) run_figure1(config, out_dir, manifest);
      if (f == 2) run_figure2(config, out_dir, manifest);
      if (f == 3) run_figure3(config, out_dir, manifest);
    }
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.error = e.what();
    write_manifest();
    throw;
  }
  write_manifest();
  return manifest;
}

}  // namespace ghost
