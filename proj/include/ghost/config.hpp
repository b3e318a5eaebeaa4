#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghost/model.hpp"
#include "ghost/scaling.hpp"

namespace ghost {

struct ModelConfig {
  std::string name = "hill";
  ModelParams params{};  // epsilon is only used by commands that take a fixed epsilon
};

// Everything a figure run needs. Grids are stored as specification strings
// (see parse_grid) so the manifest snapshot reads like the input.
struct ExperimentConfig {
  std::vector<std::string> models = {"hill", "autocatalytic"};
  ModelParams params{};
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::size_t threads = 0;

  // Stochastic simulation
  std::int64_t omega = 500;
  std::size_t replicates = 100;
  double x0_fraction = 0.75;
  double t_max = 1e6;
  std::string phi_s_grid = "1e-5:1e-1:12log";

  // Stochastic bifurcation estimate: probes at eps_c + offsets
  std::string probe_offsets = "-0.06:0.02:9";
  double probe_t_max = 1e3;
  std::size_t probe_replicates = 100;
  std::size_t bisection_steps = 3;

  // Hamiltonian flight times
  std::string phi_grid = "1e-5:1e-1:12log";
  double tol = 1e-12;
  InitialConditionEnsemble ensemble{};

  // Figure 2: epsilon = eps_c + offset
  std::vector<double> fig2_offsets = {1.127e-5, 1e-2, 0.114};
  std::string fig2_x_grid = "0.005:3:600";

  // Figure 3
  std::vector<double> fig3_phis = {1.127e-5, 0.0011, 1e-2, 0.114};
  double fig3_omega = 1e3;
  std::string fig3_p0_grid = "-0.08:0.08:81";

  // Desk scale -> full scale (omega 1e3, 1e3 replicates).
  void apply_paper_scale();
  // Throws ConfigError on any invalid value; runs before any computation.
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

// Reads {"model": {"name", "k", "C", "A", "epsilon"}} from a config file.
ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace ghost
