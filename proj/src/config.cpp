#include "ghost/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>

#include "ghost/errors.hpp"
#include "ghost/io.hpp"

namespace ghost {

using nlohmann::json;

void ExperimentConfig::apply_paper_scale() {
  omega = 1000;
  replicates = 1000;
  probe_replicates = 1000;
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw ConfigError("config: no model selected");
  ModelParams probe = params;
  probe.epsilon = 1.0;  // epsilon is set per run; only name and k, C, A are checked here
  for (const auto& m : models) ModelSpec::by_name(m, probe);
  if (omega <= 0) throw ConfigError("config: omega must be > 0");
  if (replicates < 1 || probe_replicates < 1) throw ConfigError("config: replicates must be >= 1");
  if (!(x0_fraction > 0.0)) throw ConfigError("config: x0_fraction must be > 0");
  if (!(t_max > 0.0) || !(probe_t_max > 0.0)) throw ConfigError("config: t_max must be > 0");
  if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) {
    throw ConfigError("config: tol must lie in [1e-15, 1e-8]");
  }
  auto positive_grid = [](const std::string& spec, const char* what) {
    const auto g = parse_grid(spec);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] > 0.0)) throw ConfigError(std::string("config: ") + what + " values must be > 0");
      if (i > 0 && !(g[i] > g[i - 1])) {
        throw ConfigError(std::string("config: ") + what + " must be strictly increasing");
      }
    }
  };
  positive_grid(phi_s_grid, "ssa.phi_s_grid");
  positive_grid(phi_grid, "flight.phi_grid");
  positive_grid(fig2_x_grid, "figure2.x_grid");
  if (parse_grid(probe_offsets).size() < 2) {
    throw ConfigError("config: bifurcation.probe_offsets needs at least two points");
  }
  ensemble.validate();
  if (fig2_offsets.empty()) throw ConfigError("config: figure2.eps_offsets is empty");
  if (fig3_phis.empty()) throw ConfigError("config: figure3.phis is empty");
  for (double phi : fig3_phis) {
    if (!(phi > 0.0)) throw ConfigError("config: figure3.phis values must be > 0");
  }
  if (!(fig3_omega > 0.0)) throw ConfigError("config: figure3.omega must be > 0");
  parse_grid(fig3_p0_grid);
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string("config: '") + where + "' must be an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw ConfigError(std::string("config: unknown key '") + item.key() + "' in '" + where + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void read_params(const json& m, ModelParams& p) {
  read(m, "k", p.k);
  read(m, "C", p.C);
  read(m, "A", p.A);
  read(m, "epsilon", p.epsilon);
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  const auto& e = c.ensemble;
  j = json{
      {"model",
       {{"name", c.models},
        {"k", c.params.k},
        {"C", c.params.C},
        {"A", c.params.A},
        {"epsilon", c.params.epsilon}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"ssa",
       {{"omega", c.omega},
        {"replicates", c.replicates},
        {"x0_fraction", c.x0_fraction},
        {"t_max", c.t_max},
        {"phi_s_grid", c.phi_s_grid}}},
      {"bifurcation",
       {{"probe_offsets", c.probe_offsets},
        {"t_max", c.probe_t_max},
        {"replicates", c.probe_replicates},
        {"bisection_steps", c.bisection_steps}}},
      {"flight",
       {{"phi_grid", c.phi_grid},
        {"tol", c.tol},
        {"x0_factor", e.x0_factor},
        {"n_p0", e.n_p0},
        {"p_span_max", e.p_span_max},
        {"p0_values", e.p0_values},
        {"weight_threshold", e.weight_threshold},
        {"reference_omega", e.reference_omega},
        {"bottleneck", e.bottleneck},
        {"delta", e.delta},
        {"exit_fraction", e.exit_fraction}}},
      {"figure2", {{"eps_offsets", c.fig2_offsets}, {"x_grid", c.fig2_x_grid}}},
      {"figure3",
       {{"phis", c.fig3_phis}, {"omega", c.fig3_omega}, {"p0_grid", c.fig3_p0_grid}}},
  };
}

void from_json(const json& j, ExperimentConfig& c) {
  reject_unknown(j, {"model", "seed", "threads", "ssa", "bifurcation", "flight", "figure2",
                     "figure3"},
                 "(root)");
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"name", "k", "C", "A", "epsilon"}, "model");
    if (m.contains("name")) {
      if (m.at("name").is_string()) {
        c.models = {m.at("name").get<std::string>()};
      } else {
        read(m, "name", c.models);
      }
    }
    read_params(m, c.params);
  }
  if (j.contains("seed")) {
    read(j, "seed", c.seed);
    c.seed_given = true;
  }
  read(j, "threads", c.threads);
  if (j.contains("ssa")) {
    const auto& s = j.at("ssa");
    reject_unknown(s, {"omega", "replicates", "x0_fraction", "t_max", "phi_s_grid"}, "ssa");
    read(s, "omega", c.omega);
    read(s, "replicates", c.replicates);
    read(s, "x0_fraction", c.x0_fraction);
    read(s, "t_max", c.t_max);
    read(s, "phi_s_grid", c.phi_s_grid);
  }
  if (j.contains("bifurcation")) {
    const auto& b = j.at("bifurcation");
    reject_unknown(b, {"probe_offsets", "t_max", "replicates", "bisection_steps"}, "bifurcation");
    read(b, "probe_offsets", c.probe_offsets);
    read(b, "t_max", c.probe_t_max);
    read(b, "replicates", c.probe_replicates);
    read(b, "bisection_steps", c.bisection_steps);
  }
  if (j.contains("flight")) {
    const auto& f = j.at("flight");
    reject_unknown(f, {"phi_grid", "tol", "x0_factor", "n_p0", "p_span_max", "p0_values",
                       "weight_threshold", "reference_omega", "bottleneck", "delta",
                       "exit_fraction"},
                   "flight");
    auto& e = c.ensemble;
    read(f, "phi_grid", c.phi_grid);
    read(f, "tol", c.tol);
    read(f, "x0_factor", e.x0_factor);
    read(f, "n_p0", e.n_p0);
    read(f, "p_span_max", e.p_span_max);
    read(f, "p0_values", e.p0_values);
    read(f, "weight_threshold", e.weight_threshold);
    read(f, "reference_omega", e.reference_omega);
    read(f, "bottleneck", e.bottleneck);
    read(f, "delta", e.delta);
    read(f, "exit_fraction", e.exit_fraction);
  }
  c.ensemble.flight.tol = c.tol;
  if (j.contains("figure2")) {
    const auto& f = j.at("figure2");
    reject_unknown(f, {"eps_offsets", "x_grid"}, "figure2");
    read(f, "eps_offsets", c.fig2_offsets);
    read(f, "x_grid", c.fig2_x_grid);
  }
  if (j.contains("figure3")) {
    const auto& f = j.at("figure3");
    reject_unknown(f, {"phis", "omega", "p0_grid"}, "figure3");
    read(f, "phis", c.fig3_phis);
    read(f, "omega", c.fig3_omega);
    read(f, "p0_grid", c.fig3_p0_grid);
  }
}

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c;
  from_json(parse_file(path), c);
  return c;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  ModelConfig m;
  if (!j.contains("model")) return m;
  const auto& node = j.at("model");
  if (node.contains("name")) {
    if (node.at("name").is_string()) {
      m.name = node.at("name").get<std::string>();
    } else if (node.at("name").is_array() && !node.at("name").empty()) {
      m.name = node.at("name").at(0).get<std::string>();
    }
  }
  read_params(node, m.params);
  return m;
}

}  // namespace ghost
