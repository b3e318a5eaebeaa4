#pragma once

// Reference computations that share no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "ghost/model.hpp"

namespace oracle {

// Exact mean first-passage time to 0 of a birth-death chain started at x0.
// d[k] is the mean time to go from k to k-1:
//   d[k] = 1/mu_k + (lambda_k / mu_k) d[k+1],   d[cap] = 1/mu_cap.
inline double mean_extinction_time(const ghost::ModelSpec& model, double omega, std::int64_t x0,
                                   std::int64_t cap) {
  std::vector<double> d(static_cast<std::size_t>(cap) + 2, 0.0);
  for (std::int64_t k = cap; k >= 1; --k) {
    double lambda = 0.0, mu = 0.0;
    for (const auto& r : model.reactions()) {
      const double w = r.extensive_rate(k, omega, model.params());
      (r.step > 0 ? lambda : mu) += w;
    }
    const double next = k == cap ? 0.0 : d[static_cast<std::size_t>(k) + 1];
    d[static_cast<std::size_t>(k)] = 1.0 / mu + lambda / mu * next;
  }
  double total = 0.0;
  for (std::int64_t k = 1; k <= x0; ++k) total += d[static_cast<std::size_t>(k)];
  return total;
}

// Mean-field right-hand side written out by hand, with k = C = A = 1.
inline double hill_rhs(double x, double eps) { return x * x / (1.0 + x * x) - eps * x; }
inline double autocatalytic_rhs(double x, double eps) { return x * x * (1.0 - x) - eps * x; }

// Time for dx/dt = f(x) < 0 to carry x from x_from down to x_to, by
// tanh-sinh quadrature of 1/|f| split at the slowest point.
inline double ode_passage_time(const std::function<double(double)>& f, double x_from, double x_to,
                               double x_slow) {
  boost::math::quadrature::tanh_sinh<double> q(15);
  auto g = [&](double x) { return 1.0 / std::abs(f(x)); };
  if (x_slow <= x_to || x_slow >= x_from) return q.integrate(g, x_to, x_from, 1e-14);
  return q.integrate(g, x_to, x_slow, 1e-14) + q.integrate(g, x_slow, x_from, 1e-14);
}

// Roots of 2p^2 + p - phi by Newton from fixed starting points.
inline double newton_p_plus(double phi) {
  auto f = [phi](double p) { return std::make_pair(2 * p * p + p - phi, 4 * p + 1); };
  return boost::math::tools::newton_raphson_iterate(f, phi, -0.2, 1.0, 60);
}
inline double newton_p_minus(double phi) {
  auto f = [phi](double p) { return std::make_pair(2 * p * p + p - phi, 4 * p + 1); };
  return boost::math::tools::newton_raphson_iterate(f, -0.5 - phi, -10.0, -0.3, 60);
}

// Kolmogorov distribution tail P(K > lambda).
inline double kolmogorov_tail(double lambda) {
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    s += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
  }
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace oracle
