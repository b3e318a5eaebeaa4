#pragma once

// Fehlberg's embedded Runge-Kutta 7(8) pair (13 stages). The step advances
// with the 8th-order solution; the difference to the 7th-order solution is the
// local error estimate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace ghost::rkf78 {

inline constexpr std::size_t kStages = 13;

inline constexpr std::array<double, kStages> c = {
    0.0, 2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5, 5.0 / 6.0,
    1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0, 1.0};

// Lower-triangular coupling matrix, a[i][j] for j < i.
inline constexpr std::array<std::array<double, kStages>, kStages> a = {{
    {},
    {2.0 / 27.0},
    {1.0 / 36.0, 1.0 / 12.0},
    {1.0 / 24.0, 0.0, 1.0 / 8.0},
    {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
    {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
    {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
    {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
    {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
    {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0,
     17.0 / 6.0, -1.0 / 12.0},
    {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0,
     2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0},
    {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0,
     6.0 / 41.0, 0.0},
    {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0,
     2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0},
}};

inline constexpr std::array<double, kStages> b7 = {
    41.0 / 840.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0,
    9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0, 41.0 / 840.0, 0.0, 0.0};

inline constexpr std::array<double, kStages> b8 = {
    0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0,
    9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0, 0.0, 41.0 / 840.0, 41.0 / 840.0};

// One step of size h from (t, y). rhs(t, y, dydt) fills the derivative.
// Writes the 8th-order solution to y_next and (y8 - y7) to err.
template <std::size_t N, class Rhs>
void step(const Rhs& rhs, double t, const std::array<double, N>& y, double h,
          std::array<double, N>& y_next, std::array<double, N>& err) {
  std::array<std::array<double, N>, kStages> k{};
  std::array<double, N> stage{};
  for (std::size_t s = 0; s < kStages; ++s) {
    for (std::size_t n = 0; n < N; ++n) {
      double acc = 0.0;
      for (std::size_t j = 0; j < s; ++j) acc += a[s][j] * k[j][n];
      stage[n] = y[n] + h * acc;
    }
    rhs(t + c[s] * h, stage, k[s]);
  }
  for (std::size_t n = 0; n < N; ++n) {
    double high = 0.0;
    for (std::size_t s = 0; s < kStages; ++s) high += b8[s] * k[s][n];
    y_next[n] = y[n] + h * high;
    err[n] = h * (41.0 / 840.0) * (k[11][n] + k[12][n] - k[0][n] - k[10][n]);
  }
}

// Scaled max-norm of the error: |err| / (tol * (1 + max(|y|, |y_next|))),
// i.e. absolute tolerance tol near zero and relative tolerance tol elsewhere.
template <std::size_t N>
double error_norm(const std::array<double, N>& y, const std::array<double, N>& y_next,
                  const std::array<double, N>& err, double tol) {
  double worst = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double scale = std::max(tol * (1.0 + std::max(std::abs(y[n]), std::abs(y_next[n]))),
                                  1e-300);
    worst = std::max(worst, std::abs(err[n]) / scale);
  }
  return worst;
}

// Step-size factor for the next attempt given the error norm of this one.
inline double step_factor(double err_norm) {
  if (err_norm == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err_norm, -1.0 / 8.0), 0.1, 5.0);
}

}  // namespace ghost::rkf78
