#include <cmath>

#include "doctest.h"
#include "ghost/errors.hpp"
#include "ghost/io.hpp"
#include "ghost/scaling.hpp"
#include "oracles.hpp"

using namespace ghost;

namespace {

const double kPi = std::acos(-1.0);

ScalingCurve synthetic(const std::vector<double>& phis, const std::function<double(double)>& g,
                       std::optional<double> omega = std::nullopt) {
  ScalingCurve c;
  c.omega = omega;
  for (double phi : phis) c.points.push_back({phi, g(phi), 0.0, 1});
  return c;
}

}  // namespace

TEST_CASE("ensemble configuration") {
  auto e = InitialConditionEnsemble::negative_default();
  CHECK(e.x0_factor == 1.5);
  CHECK(e.n_p0 == 100);
  CHECK_NOTHROW(e.validate());
  const auto grid = e.p0_grid(ModelSpec::hill({.epsilon = 0.5 + 1e-5}));
  REQUIRE(grid.size() == 100);
  CHECK(grid.front() == doctest::Approx(-0.1));
  CHECK(grid.back() < 0.0);
  // the span shrinks to |p_min,p| where that is smaller than 0.1
  const double eps = 0.6;
  const double p_min_p = std::log(8.0 * std::sqrt(3.0) * eps / 9.0);
  const auto near_end = e.p0_grid(ModelSpec::hill({.epsilon = eps}));
  CHECK(near_end.front() == doctest::Approx(p_min_p));
  const auto ex = InitialConditionEnsemble::explicit_p0({0.0, 0.01});
  CHECK(ex.p0_grid(ModelSpec::hill()) == std::vector<double>{0.0, 0.01});
  CHECK_FALSE(e.describe().empty());
  e.weight_threshold = 2.0;
  CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("deterministic ensemble follows the ODE quadrature") {
  const auto ens = InitialConditionEnsemble::explicit_p0({0.0});
  const std::vector<double> phis = {1e-5, 1e-4, 1e-3, 1e-2};
  for (const auto& model : {ModelSpec::hill(), ModelSpec::autocatalytic()}) {
    const auto curve = flight_time_sweep(model, phis, ens, 1);
    REQUIRE(curve.points.size() == phis.size());
    const auto cp = critical_params(model);
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const double eps = cp.eps_c + phis[i];
      const auto rhs = [&](double x) {
        return model.kind() == ModelKind::Hill ? oracle::hill_rhs(x, eps) : oracle::autocatalytic_rhs(x, eps);
      };
      const double ode = oracle::ode_passage_time(rhs, 1.5 * cp.x_c, 0.05 * cp.x_c, cp.x_c);
      CHECK(curve.points[i].value == doctest::Approx(ode).epsilon(0.05));
      CHECK(curve.points[i].spread == 0.0);
      CHECK(curve.points[i].n == 1);
    }
    CHECK(curve.provenance == Provenance::HamiltonianEnsemble);
  }
}

TEST_CASE("negative-momentum ensemble plateaus") {
  const std::vector<double> phis = {1e-5, 1e-4};
  const auto curve = flight_time_sweep(ModelSpec::hill(), phis, InitialConditionEnsemble::negative_default());
  REQUIRE(curve.points.size() == 2);
  CHECK(std::abs(curve.points[0].value - curve.points[1].value) <= 0.1 * curve.points[1].value);
  CHECK(curve.points[0].n >= 1);
}

TEST_CASE("sweep edge cases") {
  const auto ens = InitialConditionEnsemble::explicit_p0({-0.005});
  const std::vector<double> one = {1e-3};
  const auto curve = flight_time_sweep(ModelSpec::hill(), one, ens);
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].spread == 0.0);
  const std::vector<double> bad = {1e-3, 1e-4};
  CHECK_THROWS_AS(flight_time_sweep(ModelSpec::hill(), bad, ens), ConfigError);
  const std::vector<double> neg = {-1e-3};
  CHECK_THROWS_AS(flight_time_sweep(ModelSpec::hill(), neg, ens), ConfigError);
  // an orbit that leaves the window is filtered, leaving the point empty
  const auto runaway = InitialConditionEnsemble::explicit_p0({0.5});
  const auto empty = flight_time_sweep(ModelSpec::hill(), one, runaway);
  CHECK(empty.points.empty());
  CHECK(empty.empty_phis == one);
  // same result whatever the worker count
  const std::vector<double> phis = {1e-4, 1e-3, 1e-2};
  const auto a = flight_time_sweep(ModelSpec::hill(), phis, InitialConditionEnsemble::negative_default(), 1);
  const auto b = flight_time_sweep(ModelSpec::hill(), phis, InitialConditionEnsemble::negative_default(), 3);
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].value == b.points[i].value);
}

TEST_CASE("log-log slope fit") {
  const auto phis = log_grid(1e-6, 1e-2, 9);
  const auto curve = synthetic(phis, [](double p) { return std::pow(p, -0.5); });
  const auto fit = fit_loglog_slope(curve, 1e-6, 1e-2);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.slope_stderr < 1e-12);
  CHECK(fit.n == 9);
  CHECK(fit.r_squared == doctest::Approx(1.0));
  const auto part = fit_loglog_slope(curve, 1e-5, 1e-3);
  CHECK(part.n == 5);
  CHECK_THROWS_AS(fit_loglog_slope(curve, 1e-6, 1e-5), WindowError);
  CHECK_THROWS_AS(fit_loglog_slope(curve, 1e-3, 1e-5), ConfigError);
}

TEST_CASE("bottleneck quadratic roots") {
  const auto r = appendix_roots(1e-4);
  CHECK(std::abs(r.p_plus - 1e-4) <= 10 * 1e-8);
  CHECK(2 * r.p_plus * r.p_plus + r.p_plus == doctest::Approx(1e-4).epsilon(1e-14));
  const auto tiny = appendix_roots(1e-12);
  CHECK(tiny.p_minus == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(tiny.p_plus == doctest::Approx(1e-12).epsilon(1e-10));
  const auto top = appendix_roots(1.0 / 12.0);
  CHECK(top.p_plus == doctest::Approx((-1.0 + std::sqrt(5.0 / 3.0)) / 4.0).epsilon(1e-14));
  CHECK(top.p_plus == doctest::Approx(0.07275).epsilon(1e-4));
  CHECK(std::abs(top.p_plus - oracle::newton_p_plus(1.0 / 12.0)) <= 1e-12);
  CHECK_THROWS_AS(appendix_roots(0.0), DomainError);
  CHECK_THROWS_AS(appendix_roots(1.0 / 12.0 + 1e-9), DomainError);

  const auto grid = log_grid(1e-8, 1.0 / 12.0, 50);
  for (double phi : grid) {
    const auto a = appendix_roots(phi);
    CHECK(a.p_minus < -0.25);
    CHECK(a.p_plus >= 0.0);
    CHECK(std::abs(a.p_plus - oracle::newton_p_plus(phi)) <= 1e-12);
    CHECK(std::abs(a.p_minus - oracle::newton_p_minus(phi)) <= 1e-12);
    CHECK(a.c1 == doctest::Approx(std::sqrt(-a.p_minus)));
    CHECK(a.y_plus.real() == 0.0);
    CHECK(a.y_plus.imag() == doctest::Approx(std::sqrt(phi)));
    CHECK(a.y_minus == std::conj(a.y_plus));
  }
}

TEST_CASE("transit-time quadrature") {
  const auto ac = ModelSpec::autocatalytic();
  // normal form y' = -(phi + y^2)/2 on |y| <= delta
  auto window = [](double phi, double delta) { return 4.0 / std::sqrt(phi) * std::atan(delta / std::sqrt(phi)); };
  const double t4 = transit_time_quadrature(ac, 1e-4, 0.0, 0.1);
  CHECK(t4 == doctest::Approx(window(1e-4, 0.1)).epsilon(0.01));
  CHECK(t4 < 2 * kPi / std::sqrt(1e-4));
  const double t44 = transit_time_quadrature(ac, 4e-4, 0.0, 0.1);
  CHECK(t44 / t4 == doctest::Approx(window(4e-4, 0.1) / window(1e-4, 0.1)).epsilon(0.01));
  CHECK(t44 / t4 == doctest::Approx(0.5).epsilon(0.1));
  // deep in the bottleneck the window captures the full 2 pi / sqrt(phi)
  CHECK(transit_time_quadrature(ac, 1e-8, 0.0, 0.1) == doctest::Approx(2 * kPi / 1e-4).epsilon(0.01));

  SUBCASE("window is a sub-segment of the full decay") {
    const double phi = 1e-2;
    const auto hill = ModelSpec::hill();
    const double window_time = transit_time_quadrature(hill, phi, 0.0, 0.1);
    const double full = flight_time(HamiltonianSystem(model_at_phi(hill, phi)), 1.5, 0.0, FullDecay{0.05});
    CHECK(window_time <= full);
  }
  SUBCASE("agrees with the integrated orbit") {
    for (const auto& m : {ModelSpec::hill(), ModelSpec::autocatalytic()}) {
      for (double phi : {1e-2, 1e-4, 1e-6}) {
        const HamiltonianSystem sys(model_at_phi(m, phi));
        const double x_c = critical_params(m).x_c;
        const double ode = flight_time(sys, 1.5 * x_c, 0.0, FullDecay{0.05 * x_c});
        const double quad = transit_time_between(m, phi, 0.0, 1.5 * x_c, 0.05 * x_c);
        CHECK(std::abs(ode - quad) <= 1e-6 * quad);
        const double w_ode = flight_time(sys, 1.5 * x_c, 0.0, BottleneckTransit{0.1});
        CHECK(std::abs(w_ode - transit_time_quadrature(m, phi, 0.0, 0.1)) <= 1e-6 * w_ode);
      }
    }
  }
  SUBCASE("poles") {
    CHECK_THROWS_AS(transit_time_quadrature(ac, -1e-3, 0.0, 0.1), PoleError);
    CHECK_THROWS_AS(transit_time_quadrature(ac, 0.0, 0.0, 0.1), PoleError);
    CHECK_THROWS_AS(transit_time_quadrature(ac, 1e-3, 0.0, 0.6), DomainError);
    CHECK_THROWS_AS(transit_time_between(ac, 1e-3, 0.0, 0.2, 0.4), DomainError);
  }
}

TEST_CASE("bend location") {
  const auto phis = log_grid(1e-6, 1e-1, 16);
  SUBCASE("constructed crossing") {
    const auto curve = synthetic(phis, [](double p) { return std::min(100.0, std::pow(p, -0.5)); });
    const auto bend = bend_location(curve);
    CHECK(bend.phi_bend == doctest::Approx(1e-4).epsilon(1e-9));
    CHECK(bend.plateau == 100.0);
    CHECK(bend.decay.slope == doctest::Approx(-0.5));
    CHECK(bend.departure >= kPlateauPoints);
  }
  SUBCASE("regime errors") {
    CHECK_THROWS_AS(bend_location(synthetic(phis, [](double) { return 5.0; })), RegimeError);
    const std::vector<double> few(phis.begin(), phis.begin() + 7);
    CHECK_THROWS_AS(bend_location(synthetic(few, [](double p) { return std::pow(p, -0.5); })),
                    RegimeError);
    // decays from the start: no plateau
    CHECK_THROWS_AS(bend_location(synthetic(phis, [](double p) { return std::pow(p, -0.5); })),
                    RegimeError);
  }
}

TEST_CASE("data collapse") {
  const auto phis = log_grid(1e-5, 1e-1, 30);
  // curved everywhere in log-log, so a and b are separately identifiable
  auto G = [](double u) { return 50.0 * std::exp(-std::sqrt(u / 1e-2)); };
  SUBCASE("recovers known exponents") {
    const double a = 0.6, b = 0.3;
    std::vector<ScalingCurve> curves;
    for (double omega : {250.0, 500.0, 1000.0}) {
      curves.push_back(synthetic(
          phis, [&](double phi) { return std::pow(omega, -b) * G(std::pow(omega, a) * phi); }, omega));
    }
    const auto fit = collapse_fit(curves);
    CHECK(std::abs(fit.a - a) <= 0.05);
    CHECK(std::abs(fit.b - b) <= 0.05);
    CHECK(fit.objective < fit.objective_at_origin);
    CHECK(fit.objective >= 0.0);
    CHECK(fit.curves_used.size() == 3);
  }
  SUBCASE("identical curves collapse at the origin") {
    std::vector<ScalingCurve> curves;
    for (double omega : {250.0, 500.0}) curves.push_back(synthetic(phis, G, omega));
    CHECK(collapse_objective(curves, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    const auto fit = collapse_fit(curves);
    CHECK(fit.objective_at_origin == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(fit.objective <= fit.objective_at_origin);
  }
  SUBCASE("input checks") {
    std::vector<ScalingCurve> one = {synthetic(phis, G, 250.0)};
    CHECK_THROWS_AS(collapse_fit(one), ConfigError);
    std::vector<ScalingCurve> dup = {synthetic(phis, G, 250.0), synthetic(phis, G, 250.0)};
    CHECK_THROWS_AS(collapse_fit(dup), ConfigError);
    std::vector<ScalingCurve> untagged = {synthetic(phis, G, 250.0), synthetic(phis, G)};
    CHECK_THROWS_AS(collapse_fit(untagged), ConfigError);
    const std::vector<double> lo = log_grid(1e-9, 1e-8, 5), hi = log_grid(1.0, 10.0, 5);
    std::vector<ScalingCurve> apart = {synthetic(lo, G, 250.0), synthetic(hi, G, 500.0)};
    CHECK(std::isinf(collapse_objective(apart, 0.0, 0.0)));
    CHECK_THROWS_AS(collapse_fit(apart), OverlapError);
  }
}
