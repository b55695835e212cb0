"""Gauss-Legendre implicit Runge-Kutta stepping in Fourier space.

Per Fourier mode the linear part of the first-order system is
L_m = [[0, 1], [lambda_m, 0]] with lambda_m = mu - sigma*alpha*k_m^2, so the
stage equations split into independent 2s x 2s real linear solves coupled only
through the cubic term. Each step runs linearly implicit sweeps: the cubic is
lagged, the linear stage system is solved exactly with a cached batched
inverse, and the sweep repeats until the true stage residual (which equals
-dt*(A ox I)*(N_new - N_old) and is measured in the physical max norm) falls
below stage_tol.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import accel
from .core import FieldState
from .errors import InvalidParams, NonFinite, StageSolveDiverged, UnsupportedStageCount
from .spectral import cube_hat, dft_forward, dft_inverse

# Consecutive non-decreasing sweep residuals before declaring divergence.
_STALL_LIMIT = 5


@dataclass(frozen=True)
class ButcherTableau:
    stages: int
    order: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


def gauss_tableau(stages):
    """Gauss-Legendre collocation tableau; order 2s for s stages (s in 1..3)."""
    if stages == 1:
        a = [[0.5]]
        b = [1.0]
        c = [0.5]
    elif stages == 2:
        r = math.sqrt(3.0) / 6.0
        a = [[0.25, 0.25 - r], [0.25 + r, 0.25]]
        b = [0.5, 0.5]
        c = [0.5 - r, 0.5 + r]
    elif stages == 3:
        r = math.sqrt(15.0)
        a = [
            [5.0 / 36.0, 2.0 / 9.0 - r / 15.0, 5.0 / 36.0 - r / 30.0],
            [5.0 / 36.0 + r / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r / 24.0],
            [5.0 / 36.0 + r / 30.0, 2.0 / 9.0 + r / 15.0, 5.0 / 36.0],
        ]
        b = [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0]
        c = [0.5 - r / 10.0, 0.5, 0.5 + r / 10.0]
    else:
        raise UnsupportedStageCount(f"stage count must be 1, 2, or 3, got {stages}")
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    b = np.array(b, dtype=np.float64)
    b.setflags(write=False)
    c = np.array(c, dtype=np.float64)
    c.setflags(write=False)
    return ButcherTableau(stages=stages, order=2 * stages, a=a, b=b, c=c)


@dataclass(frozen=True)
class StepReport:
    iterations: int
    residual: float
    converged: bool


class StageSolver:
    """Caches the batched inverse of the per-mode linear stage matrices.

    Valid for one (params, grid, dt, tableau) combination; integrate builds one
    and reuses it for every step.
    """

    def __init__(self, params, grid, dt=None):
        self.params = params
        self.grid = grid
        self.dt = params.dt if dt is None else float(dt)
        self.tableau = gauss_tableau(params.irk_stages)
        k = grid.wavenumbers
        self.lam = params.mu - params.sigma * params.alpha * k ** 2
        s = self.tableau.stages
        n = grid.n
        m = np.zeros((n, 2 * s, 2 * s))
        m[:, np.arange(2 * s), np.arange(2 * s)] = 1.0
        for i in range(s):
            for j in range(s):
                daij = self.dt * self.tableau.a[i, j]
                m[:, 2 * i, 2 * j + 1] -= daij
                m[:, 2 * i + 1, 2 * j] -= daij * self.lam
        self.minv = np.linalg.inv(m)

    def _nonlinear(self, stage_u_hats):
        """-beta * dealiased cube of each stage, in coefficient space."""
        return [
            -self.params.beta * cube_hat(cu, self.params.dealias)
            for cu in stage_u_hats
        ]

    def solve(self, uhat, vhat, t):
        """Return (stage_u_hats, stage_v_hats, nl_hats, StepReport)."""
        s = self.tableau.stages
        n = self.grid.n
        a = self.tableau.a
        tol = self.params.stage_tol
        rhs = np.empty((n, 2 * s), dtype=np.complex128)
        nl_old = self._nonlinear([uhat] * s)
        prev_res = math.inf
        stall = 0
        for it in range(1, self.params.stage_max_iter + 1):
            for i in range(s):
                forc = a[i, 0] * nl_old[0]
                for j in range(1, s):
                    forc = forc + a[i, j] * nl_old[j]
                rhs[:, 2 * i] = uhat
                rhs[:, 2 * i + 1] = vhat + self.dt * forc
            g = accel.stage_matvec(self.minv, rhs)
            stage_u = [np.ascontiguousarray(g[:, 2 * i]) for i in range(s)]
            stage_v = [np.ascontiguousarray(g[:, 2 * i + 1]) for i in range(s)]
            nl_new = self._nonlinear(stage_u)
            res = 0.0
            for i in range(s):
                diff = a[i, 0] * (nl_new[0] - nl_old[0])
                for j in range(1, s):
                    diff = diff + a[i, j] * (nl_new[j] - nl_old[j])
                # physical max norm of the only nonzero residual component
                r_phys = np.real(np.fft.ifft(self.dt * diff) * n)
                res = max(res, float(np.max(np.abs(r_phys))))
            nl_old = nl_new
            if res <= tol:
                return stage_u, stage_v, nl_new, StepReport(it, res, True)
            if res >= prev_res:
                stall += 1
                if stall >= _STALL_LIMIT:
                    raise StageSolveDiverged(
                        f"stage residual stalled at {res:.3e} after {it} sweeps", t=t
                    )
            else:
                stall = 0
            prev_res = res
        raise StageSolveDiverged(
            f"stage residual {res:.3e} above {tol:.1e} after {self.params.stage_max_iter} sweeps",
            t=t,
        )


def irk_step(state, params, grid, solver=None):
    """Advance one step of size params.dt (or solver.dt); returns (state, report)."""
    if solver is None:
        solver = StageSolver(params, grid)
    uhat = dft_forward(state.u)
    vhat = dft_forward(state.v)
    stage_u, stage_v, nl, report = solver.solve(uhat, vhat, state.t)
    b = solver.tableau.b
    fu = b[0] * stage_v[0]
    fv = b[0] * (solver.lam * stage_u[0] + nl[0])
    for i in range(1, solver.tableau.stages):
        fu = fu + b[i] * stage_v[i]
        fv = fv + b[i] * (solver.lam * stage_u[i] + nl[i])
    new_uhat = uhat + solver.dt * fu
    new_vhat = vhat + solver.dt * fv
    new = FieldState(
        t=state.t + solver.dt,
        u=dft_inverse(new_uhat),
        v=dft_inverse(new_vhat),
    )
    return new, report


@dataclass(frozen=True)
class RunSummary:
    final_state: "FieldState"
    steps: int
    max_abs_drift: float
    max_residual: float
    total_sweeps: int


class _RotationAccumulator:
    """Streaming signed rotation (in turns) of one tracer about a fixed center."""

    # Points closer than this to the center contribute no angle.
    EPS = 1e-12

    def __init__(self, cu, cv):
        self.cu = cu
        self.cv = cv
        self.prev = None
        self.total = 0.0

    def push(self, u, v):
        du = u - self.cu
        dv = v - self.cv
        if math.hypot(du, dv) < self.EPS:
            return
        ang = math.atan2(dv, du)
        if self.prev is not None:
            d = ang - self.prev
            if d > math.pi:
                d -= 2.0 * math.pi
            elif d <= -math.pi:
                d += 2.0 * math.pi
            self.total += d
        self.prev = ang

    @property
    def turns(self):
        return self.total / (2.0 * math.pi)


def integrate(params, grid=None, state=None):
    """March from the given (or default) state to t_end with fixed steps.

    Returns (RunSummary, snapshots, diagnostics, tracks): snapshots is a list
    of FieldState at t = 0, snapshot_every, ...; diagnostics one DiagnosticsRow
    per snapshot time; tracks one per-step TracerTrack per probe. Solver
    failures and non-finite states propagate with a ``t`` attribute attached.
    """
    from .core import (
        DiagnosticsRow,
        half_domain_masks,
        initial_state,
        make_grid,
        probe_indices,
    )
    from .dynamics import energy, energy_drift, fixed_points, momentum
    from .geometry import TracerTrack

    if grid is None:
        grid = make_grid(params.grid_points, params.domain_length)
    if state is None:
        state = initial_state(params, grid)
    steps = int(round(params.t_end / params.dt))
    sps = int(round(params.snapshot_every / params.dt))
    solver = StageSolver(params, grid)
    mask_left, mask_right = half_domain_masks(grid)
    idx = probe_indices(params, grid)
    try:
        fps = fixed_points(params)
    except InvalidParams:
        fps = None  # no double well (mu or beta <= 0): every tracer uses the origin

    def nearest_fp(u0):
        if fps is None:
            return (0.0, 0.0)
        return fps.minus if u0 < 0 else fps.plus

    acc_origin = acc_first = acc_second = None
    trk_t = np.empty(steps + 1)
    trk_u = np.empty((len(idx), steps + 1))
    trk_v = np.empty((len(idx), steps + 1))
    if idx:
        acc_origin = _RotationAccumulator(0.0, 0.0)
        acc_first = _RotationAccumulator(*nearest_fp(state.u[idx[0]]))
    if len(idx) > 1:
        acc_second = _RotationAccumulator(*nearest_fp(state.u[idx[1]]))

    def record_tracers(step_no, st):
        trk_t[step_no] = st.t
        for p, j in enumerate(idx):
            trk_u[p, step_no] = st.u[j]
            trk_v[p, step_no] = st.v[j]
        if acc_origin is not None:
            acc_origin.push(st.u[idx[0]], st.v[idx[0]])
            acc_first.push(st.u[idx[0]], st.v[idx[0]])
        if acc_second is not None:
            acc_second.push(st.u[idx[1]], st.v[idx[1]])

    e0 = energy(state, params, grid)

    def diag_row(st):
        e = energy(st, params, grid)
        return DiagnosticsRow(
            t=st.t,
            energy=e,
            momentum=momentum(st, params, grid),
            energy_drift=energy_drift(e, e0),
            u_min_left=float(np.min(st.u[mask_left])),
            u_max_left=float(np.max(st.u[mask_left])),
            u_min_right=float(np.min(st.u[mask_right])),
            u_max_right=float(np.max(st.u[mask_right])),
            rot_origin=acc_origin.turns if acc_origin else 0.0,
            rot_left=acc_first.turns if acc_first else 0.0,
            rot_right=acc_second.turns if acc_second else 0.0,
        )

    record_tracers(0, state)
    snapshots = [state]
    diagnostics = [diag_row(state)]
    max_drift = 0.0
    max_residual = 0.0
    total_sweeps = 0
    for i in range(1, steps + 1):
        t_next = i * params.dt
        try:
            stepped, report = irk_step(state, params, grid, solver)
            state = FieldState(t=t_next, u=stepped.u, v=stepped.v)
        except (StageSolveDiverged, NonFinite) as exc:
            if getattr(exc, "t", None) is None:
                exc.t = t_next
            raise
        max_residual = max(max_residual, report.residual)
        total_sweeps += report.iterations
        record_tracers(i, state)
        if i % sps == 0:
            row = diag_row(state)
            snapshots.append(state)
            diagnostics.append(row)
            max_drift = max(max_drift, abs(row.energy_drift))
    tracks = [
        TracerTrack(
            probe_x=params.probes[p],
            t=trk_t.copy(),
            u=trk_u[p].copy(),
            v=trk_v[p].copy(),
        )
        for p in range(len(idx))
    ]
    summary = RunSummary(
        final_state=state,
        steps=steps,
        max_abs_drift=max_drift,
        max_residual=max_residual,
        total_sweeps=total_sweeps,
    )
    return summary, snapshots, diagnostics, tracks
