// ghost-scaler: stochastic simulation, WKB orbits and scaling fits for ghost
// transients near a saddle-node bifurcation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghost/config.hpp"
#include "ghost/errors.hpp"
#include "ghost/figures.hpp"
#include "ghost/hamiltonian.hpp"
#include "ghost/io.hpp"
#include "ghost/phase_curves.hpp"
#include "ghost/scaling.hpp"
#include "ghost/ssa.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::string config_path;
};

struct ModelOptions {
  std::optional<std::string> name;
  std::optional<double> k, C, A;
};

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--model", m.name, "hill or autocatalytic");
  cmd->add_option("--k", m.k, "growth rate");
  cmd->add_option("--C", m.C, "carrying-capacity scale (autocatalytic)");
  cmd->add_option("--A", m.A, "half-saturation (Hill)");
}

// Model at its critical epsilon; commands move epsilon from there.
ghost::ModelSpec resolve_model(const GlobalOptions& g, const ModelOptions& m) {
  ghost::ModelConfig cfg;
  if (!g.config_path.empty()) cfg = ghost::load_model_config(g.config_path);
  if (m.name) cfg.name = *m.name;
  if (m.k) cfg.params.k = *m.k;
  if (m.C) cfg.params.C = *m.C;
  if (m.A) cfg.params.A = *m.A;
  cfg.params.epsilon = 1.0;
  const auto base = ghost::ModelSpec::by_name(cfg.name, cfg.params);
  return base.with_epsilon(ghost::critical_params(base).eps_c);
}

std::uint64_t resolve_seed(const GlobalOptions& g, std::optional<std::uint64_t> config_seed) {
  if (g.seed) return *g.seed;
  if (config_seed) return *config_seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << seed << " (generated)\n";
  return seed;
}

std::size_t resolve_threads(const GlobalOptions& g) { return g.threads.value_or(0); }

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    ghost::write_text(out, content);
  }
}

// <out>.manifest.json next to a CSV produced by a single command.
void write_run_manifest(const std::string& out, const std::string& content, json config,
                        std::optional<std::uint64_t> seed) {
  if (out.empty() || out == "-") return;
  json j = {{"tool", "ghost-scaler"},
            {"version", ghost::version()},
            {"config", std::move(config)},
            {"outputs", {{{"file", fs::path(out).filename().string()},
                          {"sha256", ghost::sha256_hex(content)}}}}};
  if (seed) j["seed"] = *seed;
  ghost::write_text(out + ".manifest.json", j.dump(2) + "\n");
}

json model_json(const ghost::ModelSpec& m) {
  const auto c = ghost::critical_params(m);
  json reactions = json::array();
  for (const auto& r : m.reactions()) reactions.push_back({{"label", r.label}, {"step", r.step}});
  return {{"name", m.name()},
          {"k", m.params().k},
          {"C", m.params().C},
          {"A", m.params().A},
          {"reactions", reactions},
          {"eps_c", c.eps_c},
          {"x_c", c.x_c},
          {"eps_end", c.eps_end}};
}

std::pair<double, double> parse_window(const std::string& spec) {
  const auto pos = spec.find(':');
  if (pos == std::string::npos) throw ghost::ConfigError("window must look like lo:hi");
  const auto lo = ghost::parse_grid(spec.substr(0, pos));
  const auto hi = ghost::parse_grid(spec.substr(pos + 1));
  if (lo.size() != 1 || hi.size() != 1) throw ghost::ConfigError("window must look like lo:hi");
  return {lo[0], hi[0]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghost-scaler: ghost transients in stochastic birth-death systems"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", ghost::version());

  GlobalOptions g;
  app.add_option("--threads", g.threads, "worker threads (default: GHOST_SCALER_THREADS or all cores)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);

  // models
  auto* models = app.add_subcommand("models", "List models and their critical parameters");
  ModelOptions models_m;
  add_model_options(models, models_m);
  models->callback([&] {
    json out = json::array();
    if (models_m.name || !g.config_path.empty()) {
      out.push_back(model_json(resolve_model(g, models_m)));
    } else {
      for (const char* name : {"hill", "autocatalytic"}) {
        ModelOptions m = models_m;
        m.name = name;
        out.push_back(model_json(resolve_model(g, m)));
      }
    }
    std::cout << out.dump(2) << "\n";
  });

  // ssa
  auto* ssa = app.add_subcommand("ssa", "Exact stochastic simulation");
  ssa->require_subcommand(1);

  struct SsaOptions {
    ModelOptions m;
    std::int64_t omega = 500;
    std::size_t replicates = 100;
    double t_max = 1e6;
    double x0_fraction = 0.75;
    std::string out;
  };
  auto add_ssa_options = [](CLI::App* cmd, SsaOptions& o) {
    add_model_options(cmd, o.m);
    cmd->add_option("--omega", o.omega, "system size")->capture_default_str();
    cmd->add_option("--replicates", o.replicates, "ensemble size")->capture_default_str();
    cmd->add_option("--t-max", o.t_max, "censoring horizon")->capture_default_str();
    cmd->add_option("--x0-fraction", o.x0_fraction, "X(0) / omega")->capture_default_str();
    cmd->add_option("--out", o.out, "output CSV (default: stdout)");
  };
  auto make_cfg = [&](const SsaOptions& o, std::uint64_t seed) {
    ghost::SsaRunConfig cfg;
    cfg.omega = o.omega;
    cfg.n_replicates = o.replicates;
    cfg.t_max = o.t_max;
    cfg.x0_fraction = o.x0_fraction;
    cfg.seed = seed;
    cfg.threads = resolve_threads(g);
    cfg.validate();
    return cfg;
  };

  auto* ssa_run = ssa->add_subcommand("run", "Mean extinction time at one epsilon");
  SsaOptions run_o;
  double run_phi = 0.0;
  std::optional<double> run_eps;
  add_ssa_options(ssa_run, run_o);
  ssa_run->add_option("--phi", run_phi, "epsilon - eps_c");
  ssa_run->add_option("--epsilon", run_eps, "absolute epsilon (overrides --phi)");
  ssa_run->callback([&] {
    const auto model = resolve_model(g, run_o.m);
    const double eps = run_eps.value_or(ghost::critical_params(model).eps_c + run_phi);
    const auto cfg = make_cfg(run_o, resolve_seed(g, std::nullopt));
    const auto stats = ghost::mean_extinction_time(model.with_epsilon(eps), cfg);
    json out = {{"model", model.name()},   {"epsilon", eps},
                {"omega", cfg.omega},      {"seed", cfg.seed},
                {"replicates", cfg.n_replicates},
                {"mean_TE", stats.mean},   {"sem", stats.sem},
                {"n", stats.n_uncensored()}, {"n_censored", stats.n_censored},
                {"usable", stats.usable},  {"degenerate", stats.degenerate}};
    write_or_print(run_o.out, out.dump(2) + "\n");
  });

  auto* ssa_bif = ssa->add_subcommand("bifurcation", "Estimate the stochastic bifurcation value");
  SsaOptions bif_o;
  bif_o.t_max = 1e3;
  std::string bif_offsets = "-0.06:0.02:9";
  std::size_t bif_steps = 3;
  add_ssa_options(ssa_bif, bif_o);
  ssa_bif->add_option("--probe-offsets", bif_offsets, "probe grid as offsets from eps_c")
      ->capture_default_str();
  ssa_bif->add_option("--bisection-steps", bif_steps)->capture_default_str();
  ssa_bif->callback([&] {
    const auto model = resolve_model(g, bif_o.m);
    const double eps_c = ghost::critical_params(model).eps_c;
    const auto cfg = make_cfg(bif_o, resolve_seed(g, std::nullopt));
    std::vector<double> probes;
    for (double o : ghost::parse_grid(bif_offsets)) probes.push_back(eps_c + o);
    ghost::BifurcationOptions options;
    options.bisection_steps = bif_steps;
    const auto bif = ghost::estimate_stochastic_bifurcation(model, probes, cfg, options);
    json probe_list = json::array();
    for (const auto& p : bif.probes) {
      probe_list.push_back({{"epsilon", p.epsilon},
                            {"extinct_fraction", p.extinct_fraction},
                            {"smoothed", p.smoothed}});
    }
    json out = {{"model", model.name()},
                {"omega", cfg.omega},
                {"seed", cfg.seed},
                {"t_max", cfg.t_max},
                {"eps_c", eps_c},
                {"eps_bar_s", bif.eps_bar_s},
                {"uncertainty", bif.uncertainty},
                {"probes", probe_list}};
    write_or_print(bif_o.out, out.dump(2) + "\n");
  });

  auto* ssa_sweep = ssa->add_subcommand("sweep", "Mean extinction times over phi_s");
  SsaOptions sweep_o;
  std::string sweep_grid = "1e-5:1e-1:12log";
  std::optional<double> sweep_eps_bar;
  std::string sweep_offsets = "-0.06:0.02:9";
  double sweep_probe_t_max = 1e3;
  add_ssa_options(ssa_sweep, sweep_o);
  ssa_sweep->add_option("--phi-grid", sweep_grid, "phi_s grid")->capture_default_str();
  ssa_sweep->add_option("--eps-bar-s", sweep_eps_bar,
                        "stochastic bifurcation value (estimated when omitted)");
  ssa_sweep->add_option("--probe-offsets", sweep_offsets)->capture_default_str();
  ssa_sweep->add_option("--probe-t-max", sweep_probe_t_max)->capture_default_str();
  ssa_sweep->callback([&] {
    const auto model = resolve_model(g, sweep_o.m);
    const auto grid = ghost::parse_grid(sweep_grid);
    const auto cfg = make_cfg(sweep_o, resolve_seed(g, std::nullopt));
    double eps_bar = 0.0;
    if (sweep_eps_bar) {
      eps_bar = *sweep_eps_bar;
    } else {
      const double eps_c = ghost::critical_params(model).eps_c;
      std::vector<double> probes;
      for (double o : ghost::parse_grid(sweep_offsets)) probes.push_back(eps_c + o);
      ghost::SsaRunConfig probe_cfg = cfg;
      probe_cfg.t_max = sweep_probe_t_max;
      eps_bar = ghost::estimate_stochastic_bifurcation(model, probes, probe_cfg).eps_bar_s;
      std::cerr << "eps_bar_s: " << ghost::format_number(eps_bar) << "\n";
    }
    const auto curve = ghost::sweep_extinction_times(model, eps_bar, grid, cfg);
    const std::string content = ghost::ssa_sweep_table(curve).to_string();
    write_or_print(sweep_o.out, content);
    write_run_manifest(sweep_o.out, content,
                       {{"command", "ssa sweep"},
                        {"model", model_json(model)},
                        {"omega", cfg.omega},
                        {"replicates", cfg.n_replicates},
                        {"t_max", cfg.t_max},
                        {"x0_fraction", cfg.x0_fraction},
                        {"phi_grid", sweep_grid},
                        {"eps_bar_s", eps_bar},
                        {"empty_phis", curve.empty_phis}},
                       cfg.seed);
  });

  // wkb
  auto* wkb = app.add_subcommand("wkb", "Semiclassical Hamiltonian orbits and curves");
  wkb->require_subcommand(1);

  auto* orbit = wkb->add_subcommand("orbit", "Integrate one orbit; CSV t,x,p,S");
  ModelOptions orbit_m;
  double orbit_phi = 1e-5, orbit_x0 = 1.5, orbit_p0 = 0.0, orbit_tol = 1e-12;
  double orbit_exit = ghost::kDefaultExitFraction;
  std::string orbit_out;
  add_model_options(orbit, orbit_m);
  orbit->add_option("--phi", orbit_phi, "epsilon - eps_c")->capture_default_str();
  orbit->add_option("--x0", orbit_x0)->capture_default_str();
  orbit->add_option("--p0", orbit_p0)->capture_default_str();
  orbit->add_option("--tol", orbit_tol)->capture_default_str();
  orbit->add_option("--exit-fraction", orbit_exit, "stop at x <= fraction * x_c")
      ->capture_default_str();
  orbit->add_option("--out", orbit_out);
  orbit->callback([&] {
    const auto model = resolve_model(g, orbit_m);
    const double x_c = ghost::critical_params(model).x_c;
    const ghost::HamiltonianSystem sys(ghost::model_at_phi(model, orbit_phi));
    ghost::StopSpec stop;
    stop.x_exit = orbit_exit * x_c;
    stop.x_max = 10.0 * x_c;
    stop.p_max_abs = 5.0;
    const auto rec = ghost::integrate_orbit(sys, orbit_x0, orbit_p0, stop, orbit_tol);
    const std::string content = ghost::orbit_table(rec).to_string();
    write_or_print(orbit_out, content);
    std::cerr << "exit: " << ghost::to_string(rec.exit_reason)
              << " flight_time: " << ghost::format_number(rec.flight_time)
              << " action: " << ghost::format_number(rec.final.S)
              << " energy_drift: " << ghost::format_number(rec.energy_drift) << "\n";
    write_run_manifest(orbit_out, content,
                       {{"command", "wkb orbit"},
                        {"model", model_json(model)},
                        {"phi", orbit_phi},
                        {"x0", orbit_x0},
                        {"p0", orbit_p0},
                        {"tol", orbit_tol}},
                       std::nullopt);
  });

  auto* curves = wkb->add_subcommand("curves", "Phase curves p_H, p_1, p_2; CSV x,p_H,p_1,p_2");
  ModelOptions curves_m;
  std::optional<double> curves_eps;
  double curves_phi = 0.0;
  std::string curves_grid = "0.005:3:600";
  std::string curves_out;
  add_model_options(curves, curves_m);
  curves->add_option("--eps", curves_eps, "epsilon (default: eps_c + phi)");
  curves->add_option("--phi", curves_phi)->capture_default_str();
  curves->add_option("--x-grid", curves_grid)->capture_default_str();
  curves->add_option("--out", curves_out);
  curves->callback([&] {
    const auto model = resolve_model(g, curves_m);
    const double eps = curves_eps.value_or(ghost::critical_params(model).eps_c + curves_phi);
    const auto pc = ghost::phase_curves(model, eps, ghost::parse_grid(curves_grid));
    write_or_print(curves_out, ghost::phase_curves_table(pc).to_string());
    json summary = {{"epsilon", eps},         {"x_min_H", pc.x_min_H}, {"p_min_H", pc.p_min_H},
                    {"x_min_p", pc.x_min_p},  {"p_min_p", pc.p_min_p}};
    summary["x_F"] = pc.x_F ? json(*pc.x_F) : json(nullptr);
    summary["x_0"] = pc.x_0 ? json(*pc.x_0) : json(nullptr);
    std::cerr << summary.dump() << "\n";
  });

  auto* weights = wkb->add_subcommand("weights", "Path weights; CSV p0,action,log_weight,weight");
  ModelOptions weights_m;
  double weights_phi = 1e-5, weights_omega = 1e3, weights_tol = 1e-12;
  std::optional<double> weights_x0;
  std::string weights_grid = "-0.08:0.08:81";
  std::string weights_out;
  add_model_options(weights, weights_m);
  weights->add_option("--phi", weights_phi)->capture_default_str();
  weights->add_option("--omega", weights_omega)->capture_default_str();
  weights->add_option("--p0-grid", weights_grid)->capture_default_str();
  weights->add_option("--x0", weights_x0, "initial density (default 1.5 x_c)");
  weights->add_option("--tol", weights_tol)->capture_default_str();
  weights->add_option("--out", weights_out);
  weights->callback([&] {
    const auto model = resolve_model(g, weights_m);
    const double x_c = ghost::critical_params(model).x_c;
    const ghost::HamiltonianSystem sys(ghost::model_at_phi(model, weights_phi));
    ghost::WeightProfileOptions options;
    options.flight.tol = weights_tol;
    const auto samples = ghost::weight_profile(sys, weights_omega, ghost::parse_grid(weights_grid),
                                               weights_x0.value_or(1.5 * x_c), options);
    const std::string content = ghost::weights_table(samples).to_string();
    write_or_print(weights_out, content);
    write_run_manifest(weights_out, content,
                       {{"command", "wkb weights"},
                        {"model", model_json(model)},
                        {"phi", weights_phi},
                        {"omega", weights_omega},
                        {"p0_grid", weights_grid},
                        {"tol", weights_tol}},
                       std::nullopt);
  });

  // scaling
  auto* scaling = app.add_subcommand("scaling", "Scaling curves and fits");
  scaling->require_subcommand(1);

  auto* flight = scaling->add_subcommand("flight", "Hamiltonian flight-time sweep");
  ModelOptions flight_m;
  std::string flight_grid = "1e-5:1e-1:60log";
  std::string flight_ensemble = "default";
  double flight_threshold = 1e-2, flight_ref_omega = 1e3, flight_tol = 1e-12;
  std::optional<double> flight_delta;
  std::string flight_out;
  add_model_options(flight, flight_m);
  flight->add_option("--phi-grid", flight_grid)->capture_default_str();
  flight->add_option("--ensemble", flight_ensemble,
                     "'default' (negative p0 grid) or a p0 list/grid such as 0,0.01")
      ->capture_default_str();
  flight->add_option("--weight-threshold", flight_threshold)->capture_default_str();
  flight->add_option("--reference-omega", flight_ref_omega)->capture_default_str();
  flight->add_option("--tol", flight_tol)->capture_default_str();
  flight->add_option("--bottleneck", flight_delta, "time the window x_c +- delta instead");
  flight->add_option("--out", flight_out);
  flight->callback([&] {
    const auto model = resolve_model(g, flight_m);
    ghost::InitialConditionEnsemble ensemble;
    if (flight_ensemble != "default") ensemble.p0_values = ghost::parse_grid(flight_ensemble);
    ensemble.weight_threshold = flight_threshold;
    ensemble.reference_omega = flight_ref_omega;
    ensemble.flight.tol = flight_tol;
    if (flight_delta) {
      ensemble.bottleneck = true;
      ensemble.delta = *flight_delta;
    }
    const auto curve = ghost::flight_time_sweep(model, ghost::parse_grid(flight_grid), ensemble,
                                                resolve_threads(g));
    const std::string content = ghost::curve_table(curve).to_string();
    write_or_print(flight_out, content);
    write_run_manifest(flight_out, content,
                       {{"command", "scaling flight"},
                        {"model", model_json(model)},
                        {"phi_grid", flight_grid},
                        {"ensemble", curve.ensemble},
                        {"empty_phis", curve.empty_phis}},
                       std::nullopt);
  });

  auto* fit = scaling->add_subcommand("fit", "Log-log slope over a phi window");
  std::string fit_in, fit_window = "1e-5:1e-3";
  fit->add_option("--in", fit_in, "curve CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--window", fit_window, "phi_lo:phi_hi")->capture_default_str();
  fit->callback([&] {
    const auto [lo, hi] = parse_window(fit_window);
    const auto s = ghost::fit_loglog_slope(ghost::read_curve(fit_in), lo, hi);
    std::cout << json{{"slope", s.slope},
                      {"intercept", s.intercept},
                      {"stderr", s.slope_stderr},
                      {"r_squared", s.r_squared},
                      {"n", s.n},
                      {"window", {s.phi_lo, s.phi_hi}}}
                     .dump(2)
              << "\n";
  });

  auto* bend = scaling->add_subcommand("bend", "Plateau-to-decay bend of a curve");
  std::string bend_in;
  bend->add_option("--in", bend_in, "curve CSV")->required()->check(CLI::ExistingFile);
  bend->callback([&] {
    const auto b = ghost::bend_location(ghost::read_curve(bend_in));
    std::cout << json{{"phi_bend", b.phi_bend},
                      {"plateau", b.plateau},
                      {"departure_index", b.departure},
                      {"decay_slope", b.decay.slope},
                      {"decay_window", {b.decay.phi_lo, b.decay.phi_hi}}}
                     .dump(2)
              << "\n";
  });

  auto* collapse = scaling->add_subcommand("collapse", "Fit the data-collapse exponents a, b");
  std::vector<std::string> collapse_in;
  std::vector<double> collapse_omegas;
  std::string collapse_out;
  collapse->add_option("--in", collapse_in, "curve CSVs")->required()->check(CLI::ExistingFile);
  collapse->add_option("--omegas", collapse_omegas, "system size of each curve, in order")
      ->required()
      ->delimiter(',');
  collapse->add_option("--out", collapse_out, "output JSON (default: stdout)");
  collapse->callback([&] {
    if (collapse_in.size() != collapse_omegas.size()) {
      throw ghost::ConfigError("collapse: --in and --omegas need the same number of entries");
    }
    std::vector<ghost::ScalingCurve> curves;
    for (std::size_t i = 0; i < collapse_in.size(); ++i) {
      curves.push_back(ghost::read_curve(collapse_in[i]));
      curves.back().omega = collapse_omegas[i];
    }
    const auto c = ghost::collapse_fit(curves);
    const json out = {{"a", c.a},
                      {"b", c.b},
                      {"objective", c.objective},
                      {"objective_at_origin", c.objective_at_origin},
                      {"curves_used", c.curves_used},
                      {"inputs", collapse_in}};
    write_or_print(collapse_out, out.dump(2) + "\n");
  });

  // figures
  auto* figures = app.add_subcommand("figures", "Plot-ready data for the three figures");
  figures->require_subcommand(1);
  std::string out_dir = "out";
  bool paper_scale = false;
  std::vector<std::string> figure_models;
  figures->add_option("--out-dir", out_dir)->capture_default_str();
  figures->add_flag("--paper-scale", paper_scale, "omega 1e3 and 1e3 replicates");
  figures->add_option("--models", figure_models, "models to run")->delimiter(',');
  auto run_figures = [&](std::vector<int> which) {
    ghost::ExperimentConfig cfg;
    if (!g.config_path.empty()) cfg = ghost::load_config(g.config_path);
    if (paper_scale) cfg.apply_paper_scale();
    if (!figure_models.empty()) cfg.models = figure_models;
    if (g.threads) cfg.threads = *g.threads;
    cfg.seed = resolve_seed(g, cfg.seed_given ? std::optional(cfg.seed) : std::nullopt);
    cfg.seed_given = true;
    const auto manifest = ghost::run_figures(cfg, out_dir, which);
    for (const auto& o : manifest.outputs) std::cout << (fs::path(out_dir) / o.file).string() << "\n";
    std::cout << (fs::path(out_dir) / "manifest.json").string() << "\n";
  };
  figures->add_subcommand("fig1", "Extinction and flight-time scaling")->callback([&] {
    run_figures({1});
  });
  figures->add_subcommand("fig2", "Phase curves")->callback([&] { run_figures({2}); });
  figures->add_subcommand("fig3", "Path weights")->callback([&] { run_figures({3}); });
  figures->add_subcommand("all", "All three figures")->callback([&] { run_figures({1, 2, 3}); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ghost::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ghost::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
