#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghost/config.hpp"

namespace ghost {

std::string version();

struct StageTiming {
  std::string name;
  double seconds;
};

struct OutputDigest {
  std::string file;  // relative to the output directory
  std::string sha256;
};

// Record of one `figures` invocation: resolved config, seed, tool version,
// timings and a digest of every file written.
struct ExperimentManifest {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<StageTiming> stages;
  std::vector<OutputDigest> outputs;
  nlohmann::json results = nlohmann::json::object();
  std::string status = "ok";
  std::string error;

  nlohmann::json to_json() const;
};

// Each writes its CSV files into out_dir and appends timings, digests and
// per-model results to the manifest.
//   figure 1: fig1_top.csv (SSA, phi^(s)) and fig1_bottom.csv (flight times, phi)
//   figure 2: fig2_<model>_<i>.csv per epsilon offset (x, p_H, p_1, p_2)
//   figure 3: fig3_<model>_<i>.csv per phi (p0, action, log_weight, weight)
void run_figure1(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                 ExperimentManifest& manifest);
void run_figure2(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                 ExperimentManifest& manifest);
void run_figure3(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                 ExperimentManifest& manifest);

// Validates the config, runs the selected figures (1, 2, 3) and writes
// out_dir/manifest.json. On failure the partial manifest is written with
// status "failed" before the exception propagates.
ExperimentManifest run_figures(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                               const std::vector<int>& figures);

}  // namespace ghost
