#include "ghost/curve.hpp"

#include <cmath>

#include "ghost/errors.hpp"

namespace ghost {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::SSA:
      return "SSA";
    case Provenance::HamiltonianEnsemble:
      return "HamiltonianEnsemble";
    case Provenance::Quadrature:
      return "Quadrature";
  }
  return "SSA";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "SSA") return Provenance::SSA;
  if (s == "HamiltonianEnsemble") return Provenance::HamiltonianEnsemble;
  if (s == "Quadrature") return Provenance::Quadrature;
  throw ConfigError("unknown provenance '" + std::string(s) + "'");
}

std::vector<double> ScalingCurve::phis() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.phi);
  return out;
}

std::vector<double> ScalingCurve::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

void ScalingCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.phi > 0.0) || !std::isfinite(p.phi)) throw ConfigError("curve: phi must be > 0");
    if (!(p.value > 0.0) || !std::isfinite(p.value)) {
      throw ConfigError("curve: values must be finite and > 0");
    }
    if (i > 0 && !(p.phi > points[i - 1].phi)) {
      throw ConfigError("curve: phi must be strictly increasing");
    }
  }
}

}  // namespace ghost
