#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghost {

enum class Provenance { SSA, HamiltonianEnsemble, Quadrature };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct ScalingPoint {
  double phi;
  double value;
  double spread;  // SEM for SSA points, ensemble std for Hamiltonian points
  std::size_t n;
  std::size_t n_censored = 0;
  bool flagged = false;  // e.g. more than 10% of SSA samples censored
};

// phi -> time statistic. Points keep phi strictly increasing and value > 0;
// grid points that produced no usable statistic are listed in `empty_phis`.
struct ScalingCurve {
  std::vector<ScalingPoint> points;
  Provenance provenance = Provenance::SSA;
  std::string ensemble;
  std::string model;
  std::optional<double> omega;
  std::vector<double> empty_phis;

  std::vector<double> phis() const;
  std::vector<double> values() const;
  // Throws ConfigError if phi is not strictly increasing and positive or a
  // value is not positive.
  void validate() const;
};

}  // namespace ghost
