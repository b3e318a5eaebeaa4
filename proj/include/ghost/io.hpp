#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ghost/curve.hpp"
#include "ghost/hamiltonian.hpp"
#include "ghost/phase_curves.hpp"

namespace ghost {

// Grid specifications:
//   "a:b:N"     N evenly spaced values from a to b inclusive
//   "a:b:Nlog"  N log-spaced values from a to b inclusive (a, b > 0)
//   "v1,v2,..." explicit list
// Throws ConfigError for malformed input or an empty grid.
std::vector<double> parse_grid(std::string_view spec);
std::vector<double> linear_grid(double a, double b, std::size_t n);
std::vector<double> log_grid(double a, double b, std::size_t n);

// Shortest round-trip decimal form; scientific notation when 0 < |v| < 1e-3.
std::string format_number(double v);

// Minimal RFC 4180 table: header row plus rows of already formatted fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);

// Hex SHA-256 of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Figure/curve schema: phi,value,spread,n,provenance,model
CsvTable curve_table(const ScalingCurve& curve);
// SSA sweep schema: phi_s,mean_TE,sem,n,n_censored
CsvTable ssa_sweep_table(const ScalingCurve& curve);
// t,x,p,S
CsvTable orbit_table(const TrajectoryRecord& record);
// x,p_H,p_1,p_2
CsvTable phase_curves_table(const PhaseCurves& curves);
// p0,action,log_weight,weight (weight left empty when it underflows)
CsvTable weights_table(const std::vector<PathWeightSample>& samples);

// Reads either curve schema back into a ScalingCurve.
ScalingCurve read_curve(const std::filesystem::path& path);

}  // namespace ghost
