"""Phase-plane geometry: loops, winding numbers, rotation counts, crossings.

At a fixed time the field traces the closed curve x -> (u(x), v(x)) over one
period; a tracer at a fixed x traces an open track t -> (u(t), v(t)). Both are
treated as polylines. Winding numbers come from summed principal-value angle
increments; crossings from exact segment-pair intersection with a tolerance
scaled to the loop diameter.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import accel
from .errors import (
    CenterOnLoop,
    CenterOnTrack,
    DegenerateLoop,
    InsufficientData,
    LengthMismatch,
    NonFinite,
    NonIntegerWinding,
)

# Absolute distance below which a point coincides with a rotation center.
CENTER_EPS = 1e-12
# |angle sum / 2pi - nearest integer| allowed for a closed loop.
WINDING_GUARD = 1e-6
# Crossing tolerance as a fraction of the loop diameter.
CROSSING_REL_EPS = 1e-12


def _clean_pair(u, v, what):
    u = np.array(u, dtype=np.float64)
    v = np.array(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise LengthMismatch(f"{what} coordinate arrays must be equal-length 1-d")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise NonFinite(f"non-finite {what} coordinates")
    u.setflags(write=False)
    v.setflags(write=False)
    return u, v


@dataclass(frozen=True)
class PhaseLoop:
    """Closed (u, v) polyline; the edge from the last vertex back to the first is implicit."""

    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    t: float = 0.0

    def __post_init__(self):
        u, v = _clean_pair(self.u, self.v, "loop")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __len__(self):
        return self.u.size


@dataclass(frozen=True)
class TracerTrack:
    """Open (u, v) polyline sampled at increasing times at one probe location."""

    probe_x: float
    t: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        u, v = _clean_pair(self.u, self.v, "track")
        t = np.array(self.t, dtype=np.float64)
        if t.shape != u.shape:
            raise LengthMismatch("track time array length differs from coordinates")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __len__(self):
        return self.u.size


def phase_loop(state):
    """The instantaneous phase-plane loop of a field state."""
    return PhaseLoop(u=state.u, v=state.v, t=state.t)


def _dedup_closed(u, v):
    """Drop consecutive duplicates and a duplicated closing vertex."""
    if u.size == 0:
        return u, v
    keep = np.ones(u.size, dtype=bool)
    keep[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
    u, v = u[keep], v[keep]
    if u.size > 1 and u[-1] == u[0] and v[-1] == v[0]:
        u, v = u[:-1], v[:-1]
    return u, v


def winding_number(loop, center):
    """Signed integer turns of the closed loop about center.

    Raises CenterOnLoop when a vertex sits within CENTER_EPS of the center,
    DegenerateLoop for loops with fewer than 3 distinct consecutive vertices,
    and NonIntegerWinding when the angle sum is not an integer number of turns.
    """
    cu, cv = float(center[0]), float(center[1])
    u, v = _dedup_closed(loop.u, loop.v)
    if u.size < 3:
        raise DegenerateLoop(f"loop reduces to {u.size} vertices")
    if float(np.min(np.hypot(u - cu, v - cv))) < CENTER_EPS:
        raise CenterOnLoop(f"center ({cu}, {cv}) lies on the loop")
    total = accel.turn_sum(u, v, cu, cv, True)
    turns = total / (2.0 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) > WINDING_GUARD:
        raise NonIntegerWinding(f"angle sum is {turns} turns, not an integer")
    return int(nearest)


def cumulative_rotation(track, center):
    """Signed rotation, in turns, accumulated along an open track about center."""
    cu, cv = float(center[0]), float(center[1])
    if len(track) < 2:
        raise InsufficientData(f"track has {len(track)} samples; need at least 2")
    if float(np.min(np.hypot(track.u - cu, track.v - cv))) < CENTER_EPS:
        raise CenterOnTrack(f"center ({cu}, {cv}) lies on the track")
    return accel.turn_sum(track.u, track.v, cu, cv, False) / (2.0 * math.pi)


@dataclass(frozen=True)
class CrossingSet:
    """Transverse self-intersections of a loop: edge indices, parameters, points."""

    seg_a: np.ndarray = field(repr=False)
    seg_b: np.ndarray = field(repr=False)
    ta: np.ndarray = field(repr=False)
    tb: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    @property
    def count(self):
        return int(self.seg_a.size)

    def __len__(self):
        return self.count


def self_intersections(loop):
    """All crossings between non-adjacent edges of the closed loop.

    Touch tolerance is CROSSING_REL_EPS times the loop's max pairwise diameter,
    applied per segment in parameter space. Exactly parallel segment pairs are
    skipped. Results are ordered lexicographically by (seg_a, seg_b).
    """
    u, v = _dedup_closed(loop.u, loop.v)
    m = u.size
    # after deduplication two surviving vertices can never coincide
    if m < 2:
        raise DegenerateLoop("all loop points coincide")
    if m < 4:
        z = np.empty(0)
        return CrossingSet(
            seg_a=z.astype(np.int64),
            seg_b=z.astype(np.int64),
            ta=z.copy(),
            tb=z.copy(),
            points=np.empty((0, 2)),
        )
    diam = float(np.max(np.hypot(u[:, None] - u[None, :], v[:, None] - v[None, :])))
    eps = CROSSING_REL_EPS * diam
    i, j, ta, tb = accel.segment_hits(np.ascontiguousarray(u), np.ascontiguousarray(v), eps)
    px = u[i] + ta * (u[(i + 1) % m] - u[i])
    py = v[i] + ta * (v[(i + 1) % m] - v[i])
    return CrossingSet(seg_a=i, seg_b=j, ta=ta, tb=tb, points=np.column_stack([px, py]))


def split_at_crossing(loop, seg_a, seg_b, ta, tb):
    """Split a closed loop at one self-intersection into its two sub-loops.

    The crossing point becomes a vertex of both sub-loops; for any center off
    both sub-loops the winding numbers add up to the original loop's.
    """
    u, v = _dedup_closed(loop.u, loop.v)
    m = u.size
    if not (0 <= seg_a < seg_b < m):
        raise ValueError(f"need 0 <= seg_a < seg_b < {m}, got {seg_a}, {seg_b}")
    pu = u[seg_a] + ta * (u[(seg_a + 1) % m] - u[seg_a])
    pv = v[seg_a] + ta * (v[(seg_a + 1) % m] - v[seg_a])
    mid_u = np.concatenate([[pu], u[seg_a + 1 : seg_b + 1]])
    mid_v = np.concatenate([[pv], v[seg_a + 1 : seg_b + 1]])
    rest_u = np.concatenate([[pu], u[seg_b + 1 :], u[: seg_a + 1]])
    rest_v = np.concatenate([[pv], v[seg_b + 1 :], v[: seg_a + 1]])
    return (
        PhaseLoop(u=mid_u, v=mid_v, t=loop.t),
        PhaseLoop(u=rest_u, v=rest_v, t=loop.t),
    )


class ModeLabel(enum.Enum):
    BREATHER = "breather"
    ORDINARY = "ordinary"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ClassifyResult:
    label: ModeLabel
    m_left: float
    m_right: float
    rot_left: float
    rot_origin: float
    final_t: float


def _safe_rotation(track, center):
    try:
        return cumulative_rotation(track, center)
    except CenterOnTrack:
        return 0.0


def classify_mode(diagnostics, track, params):
    """Label a finished run as breather, ordinary, or indeterminate.

    Confinement margins use diagnostics rows from the last seven eighths of the
    run (the first eighth is transient): m_left is the worst (smallest) left
    half minimum of u, m_right the worst (largest) right half maximum.
    Rotation counts use the full first-probe track. Breather: left half stays
    positive, right half stays negative, and the tracer completes at least one
    turn about the positive fixed point. Ordinary: at least one full turn about
    the origin while confinement fails on either side.
    """
    from .dynamics import fixed_points

    if not diagnostics:
        raise InsufficientData("no diagnostics rows")
    if track is None or len(track) < 2:
        raise InsufficientData("first-probe track missing or too short")
    final_t = diagnostics[-1].t
    if final_t < 4.0 * params.snapshot_every:
        raise InsufficientData(
            f"run covers t={final_t}; need at least 4 snapshot intervals "
            f"({4.0 * params.snapshot_every})"
        )
    t_skip = final_t / 8.0
    kept = [row for row in diagnostics if row.t >= t_skip]
    if not kept:
        raise InsufficientData("no diagnostics rows past the transient window")
    m_left = min(row.u_min_left for row in kept)
    m_right = max(row.u_max_right for row in kept)
    fps = fixed_points(params)
    rot_left = _safe_rotation(track, fps.plus)
    rot_origin = _safe_rotation(track, fps.center)
    if m_left > 0.0 and m_right < 0.0 and abs(rot_left) >= 1.0:
        label = ModeLabel.BREATHER
    elif abs(rot_origin) >= 1.0 and (m_left <= 0.0 or m_right >= 0.0):
        label = ModeLabel.ORDINARY
    else:
        label = ModeLabel.INDETERMINATE
    return ClassifyResult(
        label=label,
        m_left=m_left,
        m_right=m_right,
        rot_left=rot_left,
        rot_origin=rot_origin,
        final_t=final_t,
    )
