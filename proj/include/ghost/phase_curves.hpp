#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ghost/model.hpp"

namespace ghost {

// Nontrivial H = 0 branch and nullclines of a birth-death Hamiltonian, with
// B(x) the total birth rate and D(x) the total death rate:
//   p_H(x) = log(D / B)      (H = 0)
//   p_1(x) = p_H(x) / 2      (dx/dt = 0)
//   p_2(x) = log(D' / B')    (dp/dt = 0)
struct PhaseCurves {
  double epsilon;
  std::vector<double> x;
  std::vector<double> p_H;
  std::vector<double> p_1;
  std::vector<double> p_2;
  double x_min_H, p_min_H;
  double x_min_p, p_min_p;
  // Zeros of p_2, x_F <= x_0; present only while p_min_p <= 0.
  std::optional<double> x_F;
  std::optional<double> x_0;
};

double branch_p_H(const ModelSpec& model, double x);
double branch_p_2(const ModelSpec& model, double x);

// Curves of `model` at the given epsilon sampled on x_grid (all points > 0).
// Throws DomainError for epsilon <= 0 or a nonpositive grid point.
PhaseCurves phase_curves(const ModelSpec& model, double epsilon, std::span<const double> x_grid);

}  // namespace ghost
