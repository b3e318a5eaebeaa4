import math

import numpy as np
import pytest

import ghost_scaler as gs


def test_critical_points():
    h = gs.hill().critical()
    assert h.eps_c == pytest.approx(0.5)
    assert h.x_c == pytest.approx(1.0)
    assert h.eps_end == pytest.approx(3 * math.sqrt(3) / 8)
    a = gs.autocatalytic().critical()
    assert (a.eps_c, a.x_c) == pytest.approx((0.25, 0.5))


def test_model_defaults_to_critical_epsilon():
    m = gs.Model("hill", A=2.0)
    assert m.epsilon == pytest.approx(m.critical().eps_c)
    assert m.at_phi(1e-3).epsilon == pytest.approx(m.epsilon + 1e-3)
    assert m.rhs(0.0) == 0.0


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        gs.parse_grid("1:2")
    with pytest.raises(ValueError):
        gs.Model("lotka")
    with pytest.raises(gs.ConfigError):
        gs.mean_extinction_time(gs.hill(), omega=0)
    with pytest.raises(RuntimeError):
        gs.bend([1e-4, 1e-3, 1e-2, 1e-1, 0.2, 0.3, 0.4, 0.5], [5.0] * 8)


def test_ssa_reproducible():
    m = gs.autocatalytic().at_phi(0.1)
    a = gs.mean_extinction_time(m, omega=50, replicates=40, seed=9, threads=1)
    b = gs.mean_extinction_time(m, omega=50, replicates=40, seed=9, threads=2)
    assert a.n_censored == 0
    assert np.array_equal(a.times, b.times)
    assert a.mean == pytest.approx(a.times.mean())


def test_deterministic_orbit_and_quadrature():
    m = gs.autocatalytic().at_phi(1e-4)
    o = gs.orbit(m, 0.75, 0.0, 0.025)
    assert o["exit"] == "ReachedExitThreshold"
    assert np.max(np.abs(o["p"])) <= 1e-10
    q = gs.transit_time(gs.autocatalytic(), 1e-4)
    assert q == pytest.approx(4 / math.sqrt(1e-4) * math.atan(0.1 / math.sqrt(1e-4)), rel=0.01)


def test_flight_slope_and_roots():
    phi = gs.parse_grid("1e-5:1e-3:8log")
    c = gs.flight_sweep(gs.hill(), phi, p0_values=[0.0])
    slope, _ = gs.fit_slope(c["phi"], c["value"], 1e-5, 1e-3)
    assert slope == pytest.approx(-0.5, abs=0.05)
    lo, hi = gs.appendix_roots(1e-4)
    assert 2 * hi * hi + hi == pytest.approx(1e-4, rel=1e-12)
    assert lo < -0.25


def test_weights_and_phase_curves():
    m = gs.hill().at_phi(1.127e-5)
    w = gs.path_weights(m, 1e3, [-2e-4, 0.0, 2e-4])
    assert w["log_weight"][1] == 0.0
    assert w["log_weight"][0] > math.log(0.5)
    assert w["log_weight"][2] < math.log(1e-3)
    pc = gs.phase_curves(gs.hill(), 0.5 + 1e-2, gs.parse_grid("0.05:3:50"))
    assert len(pc["p_H"]) == 50
    assert pc["x_F"] is not None


def test_collapse_recovers_synthetic_exponents():
    phi = np.array(gs.parse_grid("1e-5:1e-1:30log"))

    def G(u):
        return 50 * np.exp(-np.sqrt(u / 1e-2))

    curves = [(om, phi, om ** -0.3 * G(om ** 0.6 * phi)) for om in (250.0, 500.0, 1000.0)]
    f = gs.collapse(curves)
    assert f["a"] == pytest.approx(0.6, abs=0.05)
    assert f["b"] == pytest.approx(0.3, abs=0.05)
    assert f["objective"] < f["objective_at_origin"]
