"""Continuous-time dynamics on the grid: right-hand side and conserved quantities.

The second-order field equation is reduced to du/dt = v,
dv/dt = sigma*alpha*D2 u + mu*u - beta*u^3, with D2 the spectral second
derivative. sigma = +1 ("standard_wave") keeps the usual wave operator; the
equation as written with a +alpha*u_xx term moved to the other side flips it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import DRIFT_GUARD
from .errors import InvalidParams, NonFinite
from .spectral import cube_dealiased, derivative_multipliers, dft_forward, dft_inverse


def _apply_multiplier(c, mult):
    return dft_inverse(mult * c)


def rhs(state_u, state_v, params, grid):
    """Time derivative (du, dv) of the collocated first-order system."""
    _, d2 = derivative_multipliers(grid)
    lap = _apply_multiplier(dft_forward(state_u), d2)
    cubic = cube_dealiased(state_u, params.dealias)
    dv = params.sigma * params.alpha * lap + params.mu * state_u - params.beta * cubic
    du = np.array(state_v, dtype=np.float64, copy=True)
    if not (np.all(np.isfinite(du)) and np.all(np.isfinite(dv))):
        raise NonFinite("right-hand side produced non-finite entries")
    return du, dv


def energy(state, params, grid):
    """Discrete energy dx * sum(v^2/2 + sigma*alpha*(Du)^2/2 - mu*u^2/2 + beta*u^4/4)."""
    d1, _ = derivative_multipliers(grid)
    du = _apply_multiplier(dft_forward(state.u), d1)
    dens = (
        0.5 * state.v ** 2
        + 0.5 * params.sigma * params.alpha * du ** 2
        - 0.5 * params.mu * state.u ** 2
        + 0.25 * params.beta * state.u ** 4
    )
    val = grid.dx * float(np.sum(dens))
    if not math.isfinite(val):
        raise NonFinite(f"energy non-finite at t={state.t}")
    return val


def momentum(state, params, grid):
    """Discrete field momentum dx * sum(v * Du); quadratic, so Gauss steps preserve it."""
    d1, _ = derivative_multipliers(grid)
    du = _apply_multiplier(dft_forward(state.u), d1)
    val = grid.dx * float(np.sum(state.v * du))
    if not math.isfinite(val):
        raise NonFinite(f"momentum non-finite at t={state.t}")
    return val


def energy_drift(e_now, e_ref):
    return (e_now - e_ref) / max(abs(e_ref), DRIFT_GUARD)


@dataclass(frozen=True)
class FixedPointSet:
    """Spatially uniform equilibria of the local dynamics in the (u, v) plane."""

    center: tuple
    plus: tuple
    minus: tuple

    def as_list(self):
        return [self.center, self.plus, self.minus]


def fixed_points(params):
    """(0,0) and (+-sqrt(mu/beta), 0); requires mu, beta > 0."""
    violations = []
    if params.mu <= 0:
        violations.append(f"mu must be positive for a double well, got {params.mu}")
    if params.beta <= 0:
        violations.append(f"beta must be positive for a double well, got {params.beta}")
    if violations:
        raise InvalidParams(violations)
    ustar = math.sqrt(params.mu / params.beta)
    return FixedPointSet(center=(0.0, 0.0), plus=(ustar, 0.0), minus=(-ustar, 0.0))
