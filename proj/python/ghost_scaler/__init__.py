"""Ghost transients near a saddle-node bifurcation.

Thin wrapper over the C++ core: exact stochastic simulation, semiclassical
Hamiltonian orbits, and the scaling fits that compare the two.
"""

from ._core import (
    ConfigError,
    CriticalParams,
    ExtinctionStats,
    Model,
    ModelParams,
    NumericalError,
    __version__,
    appendix_roots,
    bend,
    collapse,
    fit_slope,
    flight_sweep,
    mean_extinction_time,
    orbit,
    parse_grid,
    path_weights,
    phase_curves,
    ssa_sweep,
    stochastic_bifurcation,
    transit_time,
)


def hill(**kw):
    return Model("hill", **kw)


def autocatalytic(**kw):
    return Model("autocatalytic", **kw)


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
