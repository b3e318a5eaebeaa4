#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ghost/errors.hpp"
#include "ghost/hamiltonian.hpp"
#include "ghost/io.hpp"
#include "ghost/phase_curves.hpp"

using namespace ghost;

namespace {

ModelSpec hill_copy() {
  std::vector<ReactionSpec> reactions;
  reactions.push_back({"birth", +1,
                       [](std::int64_t n, double omega, const ModelParams&) {
                         const double X = static_cast<double>(n);
                         return omega * X * X / (omega * omega + X * X);
                       },
                       [](double x, const ModelParams&) { return x * x / (1 + x * x); },
                       [](double x, const ModelParams&) {
                         return 2 * x / ((1 + x * x) * (1 + x * x));
                       }});
  reactions.push_back({"decay", -1,
                       [](std::int64_t n, double, const ModelParams& p) {
                         return p.epsilon * static_cast<double>(n);
                       },
                       [](double x, const ModelParams& p) { return p.epsilon * x; },
                       [](double, const ModelParams& p) { return p.epsilon; }});
  return ModelSpec::custom("hill-copy", std::move(reactions), {.epsilon = 0.5});
}

}  // namespace

TEST_CASE("branch identities") {
  const auto grid = linear_grid(0.002, 2.0, 1000);
  for (const auto& m : {ModelSpec::hill(), ModelSpec::autocatalytic()}) {
    const auto cp = critical_params(m);
    for (double eps : {cp.eps_c - 0.05, cp.eps_c, cp.eps_c + 1e-4, cp.eps_c + 0.05, cp.eps_end + 0.01}) {
      const auto curves = phase_curves(m, eps, grid);
      const HamiltonianSystem sys(m.with_epsilon(eps));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(sys.energy(grid[i], curves.p_H[i])) <= 1e-13);
        CHECK(curves.p_1[i] - curves.p_H[i] / 2.0 == 0.0);
        // p_1 is the dx/dt = 0 nullcline, p_2 the dp/dt = 0 one
        CHECK(std::abs(sys.dx_dt(grid[i], curves.p_1[i])) <= 1e-12);
        CHECK(std::abs(sys.dp_dt(grid[i], curves.p_2[i])) <= 1e-12);
      }
    }
  }
}

TEST_CASE("minima in closed form") {
  const std::vector<double> x = {0.5, 1.0};
  const auto at_critical = phase_curves(ModelSpec::hill(), 0.5, x);
  CHECK(at_critical.p_min_H == 0.0);
  CHECK(at_critical.x_min_H == 1.0);

  const auto hill = phase_curves(ModelSpec::hill(), 0.6, x);
  CHECK(hill.x_min_p == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(hill.p_min_p == doctest::Approx(std::log(8.0 * std::sqrt(3.0) * 0.6 / 9.0)).epsilon(1e-14));
  CHECK(hill.p_min_p == doctest::Approx(-0.0793).epsilon(1e-3));
  const HamiltonianSystem sys(ModelSpec::hill({.epsilon = 0.6}));
  CHECK(std::abs(sys.dp_dt(hill.x_min_p, hill.p_min_p)) < 1e-14);
  CHECK(branch_p_H(ModelSpec::hill({.epsilon = 0.6}), 1.0) == doctest::Approx(std::log(1.2)));
  REQUIRE(hill.x_F);
  REQUIRE(hill.x_0);
  CHECK(*hill.x_F < hill.x_min_p);
  CHECK(*hill.x_0 > hill.x_min_p);
  const auto m06 = ModelSpec::hill({.epsilon = 0.6});
  CHECK(std::abs(branch_p_2(m06, *hill.x_F)) < 1e-12);
  CHECK(std::abs(branch_p_2(m06, *hill.x_0)) < 1e-12);

  const auto ac_end = phase_curves(ModelSpec::autocatalytic(), 1.0 / 3.0, x);
  CHECK(std::abs(ac_end.p_min_p) < 1e-15);
  const auto ac = phase_curves(ModelSpec::autocatalytic(), 0.25, x);
  CHECK(ac.x_min_H == 0.5);
  CHECK(ac.p_min_H == 0.0);
}

TEST_CASE("tunnel opening just above the bifurcation") {
  const auto grid = linear_grid(0.005, 3.0, 600);
  const auto open = phase_curves(ModelSpec::hill(), 0.5 + 1.127e-5, grid);
  const double min_open = *std::min_element(open.p_H.begin(), open.p_H.end());
  CHECK(min_open > 0.0);
  CHECK(min_open < 1e-4);
  const auto closed = phase_curves(ModelSpec::hill(), 0.5, grid);
  const double min_closed = *std::min_element(closed.p_H.begin(), closed.p_H.end());
  CHECK(min_closed >= 0.0);
  CHECK(min_closed < 1e-4);
}

TEST_CASE("beyond eps_end the p_2 curve is positive") {
  const auto grid = linear_grid(0.005, 3.0, 600);
  for (const auto& m : {ModelSpec::hill(), ModelSpec::autocatalytic()}) {
    const double eps = critical_params(m).eps_end + 0.01;
    const auto curves = phase_curves(m, eps, grid);
    for (double p : curves.p_2) CHECK(p > 0.0);
    CHECK(curves.p_min_p > 0.0);
    CHECK_FALSE(curves.x_F);
    CHECK_FALSE(curves.x_0);
  }
}

TEST_CASE("custom models use the numerical search") {
  const std::vector<double> x = {0.5, 1.0};
  const auto m = hill_copy();
  const auto curves = phase_curves(m, 0.6, x);
  CHECK(curves.x_min_p == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(curves.p_min_p == doctest::Approx(std::log(8.0 * std::sqrt(3.0) * 0.6 / 9.0)).epsilon(1e-10));
  CHECK(curves.x_min_H == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(curves.p_min_H == doctest::Approx(std::log(1.2)).epsilon(1e-10));
}

TEST_CASE("phase curve domain") {
  const std::vector<double> bad = {0.0, 1.0};
  CHECK_THROWS_AS(phase_curves(ModelSpec::hill(), 0.5, bad), DomainError);
  const std::vector<double> ok = {1.0};
  CHECK_THROWS_AS(phase_curves(ModelSpec::hill(), 0.0, ok), DomainError);
}
