"""Configuration, grid construction, and the state/record types shared by all modules."""

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import IncompatibleDomain, InvalidGrid, LengthMismatch, NonFinite

LAPLACIAN_SIGNS = ("standard_wave", "as_written")
DEALIAS_MODES = ("none", "pad2x")

# Guard used in energy_drift = (E - E0)/max(|E0|, DRIFT_GUARD); keeps the drift
# well-defined for the zero state without distorting it for any physical one.
DRIFT_GUARD = 1e-30

_REL_TOL = 1e-12


@dataclass(frozen=True)
class SimParams:
    """All scalar coefficients and discretization controls of one run."""

    alpha: float = 2.0 ** -8
    beta: float = 1.0
    mu: float = 0.00305
    amplitude: float = 0.04
    domain_length: float = 8.0
    grid_points: int = 128
    dt: float = 0.125
    t_end: float = 2048.0
    snapshot_every: float = 16.0
    laplacian_sign: str = "standard_wave"
    dealias: str = "pad2x"
    irk_stages: int = 2
    stage_tol: float = 1e-13
    stage_max_iter: int = 100
    probes: tuple = (2.0, 6.0)

    @property
    def sigma(self):
        """Sign of the dispersive term: +1 keeps the standard wave operator."""
        return 1.0 if self.laplacian_sign == "standard_wave" else -1.0


def _is_integer_multiple(value, unit, scale):
    if unit <= 0:
        return False
    ratio = value / unit
    return abs(ratio - round(ratio)) <= _REL_TOL * max(1.0, abs(scale))


def validate_params(params):
    """Return the list of invariant violations; empty means valid. Never raises."""
    v = []
    if not params.alpha > 0:
        v.append(f"alpha must be > 0, got {params.alpha}")
    if not params.beta > 0:
        v.append(f"beta must be > 0, got {params.beta}")
    if not params.mu > 0:
        v.append(f"mu must be > 0, got {params.mu}")
    if not params.domain_length > 0:
        v.append(f"domain_length must be > 0, got {params.domain_length}")
    if not params.dt > 0:
        v.append(f"dt must be > 0, got {params.dt}")
    if params.t_end < 0:
        v.append(f"t_end must be >= 0, got {params.t_end}")
    n = params.grid_points
    if n % 2 != 0 or n < 8:
        v.append(f"grid_points must be even and >= 8, got {n}")
    if params.snapshot_every <= 0:
        v.append(f"snapshot_every must be positive, got {params.snapshot_every}")
    elif params.dt > 0 and not _is_integer_multiple(
        params.snapshot_every, params.dt, params.snapshot_every / params.dt
    ):
        v.append(
            f"snapshot_every = {params.snapshot_every} is not an integer multiple of dt = {params.dt}"
        )
    if params.dt > 0 and params.t_end > 0 and not _is_integer_multiple(
        params.t_end, params.dt, params.t_end / params.dt
    ):
        v.append(f"t_end = {params.t_end} is not an integer multiple of dt = {params.dt}")
    if params.laplacian_sign not in LAPLACIAN_SIGNS:
        v.append(
            f"laplacian_sign must be one of {LAPLACIAN_SIGNS}, got {params.laplacian_sign!r}"
        )
    if params.dealias not in DEALIAS_MODES:
        v.append(f"dealias must be one of {DEALIAS_MODES}, got {params.dealias!r}")
    if params.irk_stages not in (1, 2, 3):
        v.append(f"irk_stages must be 1, 2, or 3, got {params.irk_stages}")
    if not params.stage_tol > 0:
        v.append(f"stage_tol must be > 0, got {params.stage_tol}")
    if params.stage_max_iter < 1:
        v.append(f"stage_max_iter must be >= 1, got {params.stage_max_iter}")
    length = params.domain_length
    for x in params.probes:
        if not (0 <= x < length):
            v.append(f"probe {x} outside [0, {length})")
            continue
        if length > 0 and n > 0:
            r = x * n / length
            if abs(r - round(r)) > _REL_TOL * max(1.0, abs(r)):
                v.append(f"probe {x} not on a grid node (x*N/L = {r})")
    return v


def params_to_dict(params):
    """Resolved parameter mapping, probes as a list (manifest/serialization form)."""
    out = {}
    for f in fields(SimParams):
        value = getattr(params, f.name)
        if f.name == "probes":
            value = list(value)
        out[f.name] = value
    return out


def params_from_dict(mapping):
    known = {f.name for f in fields(SimParams)}
    unknown = set(mapping) - known
    if unknown:
        raise KeyError(f"unknown parameter keys: {sorted(unknown)}")
    kwargs = dict(mapping)
    if "probes" in kwargs:
        kwargs["probes"] = tuple(float(x) for x in kwargs["probes"])
    return SimParams(**kwargs)


@dataclass(frozen=True)
class Grid:
    """Periodic collocation grid: nodes x_j = jL/N and FFT-ordered wavenumbers 2*pi*m/L."""

    n: int
    length: float
    nodes: np.ndarray = field(repr=False)
    wavenumbers: np.ndarray = field(repr=False)

    @property
    def dx(self):
        return self.length / self.n


def make_grid(n, length):
    if n % 2 != 0 or n < 8 or length <= 0:
        raise InvalidGrid(f"need even n >= 8 and length > 0, got n={n}, length={length}")
    nodes = np.arange(n) * (length / n)
    wavenumbers = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    nodes.setflags(write=False)
    wavenumbers.setflags(write=False)
    return Grid(n=int(n), length=float(length), nodes=nodes, wavenumbers=wavenumbers)


@dataclass(frozen=True)
class FieldState:
    """Time t plus collocated samples of u and v = du/dt on the periodic grid."""

    t: float
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
            raise LengthMismatch(f"u and v must be equal-length 1-d arrays, got {u.shape} and {v.shape}")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise NonFinite(f"non-finite field entries at t={self.t}")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


def initial_state(params, grid):
    """Profile A*sin(pi x/4) at rest; L must keep it periodic."""
    ratio = grid.length / 8.0
    if grid.length <= 0 or abs(ratio - round(ratio)) > _REL_TOL or round(ratio) < 1:
        raise IncompatibleDomain(
            f"domain_length must be a positive multiple of 8 for the sine profile, got {grid.length}"
        )
    u = params.amplitude * np.sin(np.pi * grid.nodes / 4.0)
    v = np.zeros(grid.n)
    return FieldState(t=0.0, u=u, v=v)


@dataclass(frozen=True)
class DiagnosticsRow:
    """Per-output-time conserved quantities, confinement margins, rotation counts."""

    t: float
    energy: float
    momentum: float
    energy_drift: float
    u_min_left: float
    u_max_left: float
    u_min_right: float
    u_max_right: float
    rot_origin: float
    rot_left: float
    rot_right: float


DIAGNOSTICS_COLUMNS = (
    "t",
    "energy",
    "momentum",
    "energy_drift",
    "u_min_left",
    "u_max_left",
    "u_min_right",
    "u_max_right",
    "rot_origin",
    "rot_left",
    "rot_right",
)


def half_domain_masks(grid):
    """Boolean masks for the strict interiors 0 < x < L/2 and L/2 < x < L."""
    x = grid.nodes
    half = grid.length / 2.0
    return (x > 0) & (x < half), (x > half) & (x < grid.length)


def probe_indices(params, grid):
    idx = []
    for x in params.probes:
        r = x * grid.n / grid.length
        j = int(round(r))
        if abs(r - j) > _REL_TOL * max(1.0, abs(r)) or not (0 <= j < grid.n):
            raise InvalidGrid(f"probe {x} does not lie on a grid node")
        idx.append(j)
    return idx
