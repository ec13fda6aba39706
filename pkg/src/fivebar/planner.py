"""Piecewise quintic joint trajectories for one flexion-extension cycle.

A cycle is four quintic segments in absolute time, ``[0, t_v1]``,
``[t_v1, t_f1]``, ``[t_f1, t_v2]`` and ``[t_v2, t_f2]``. Each half-cycle
(two segments around one via point) is one 12x12 linear system whose rows
are, in order::

    p(t0), v(t0), a(t0), j(t0)             first segment at the start
    p1(tv), p2(tv)                         via position, once per segment
    v1(tv) - v2(tv), a1(tv) - a2(tv)       via continuity (right-hand side 0)
    p(tf), v(tf), a(tf), j(tf)             second segment at the end
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from .errors import InvalidInputError, SingularSystemError

RCOND_MIN = 1e-12


@dataclass(frozen=True)
class CycleTiming:
    t_v1: float = 2.5
    t_f1: float = 5.0
    t_v2: float = 7.5
    t_f2: float = 10.0

    def __post_init__(self):
        if not (0 < self.t_v1 < self.t_f1 < self.t_v2 < self.t_f2):
            raise InvalidInputError("timing must satisfy 0 < t_v1 < t_f1 < t_v2 < t_f2")

    @property
    def knots(self):
        return (0.0, self.t_v1, self.t_f1, self.t_v2, self.t_f2)


@dataclass(frozen=True)
class CycleWaypoints:
    """Joint angles (rad) at ``0, t_v1, t_f1, t_v2, t_f2``."""

    start: float
    via1: float
    extended: float
    via2: float
    end: float

    def __post_init__(self):
        if not math.isclose(self.start, self.end, rel_tol=0.0, abs_tol=1e-12):
            raise InvalidInputError("a cycle must end where it starts")

    @classmethod
    def from_degrees(cls, values: Sequence[float]):
        return cls(*(math.radians(v) for v in values))

    @property
    def values(self):
        return (self.start, self.via1, self.extended, self.via2, self.end)


def _basis(t: float, order: int):
    """Row of d^order/dt^order [1, t, ..., t^5]."""
    row = np.zeros(6)
    for k in range(order, 6):
        row[k] = math.perm(k, order) * t ** (k - order)
    return row


@dataclass(frozen=True, eq=False)
class QuinticSegment:
    coeffs: np.ndarray
    t_lo: float
    t_hi: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64)
        if c.shape != (6,) or not np.all(np.isfinite(c)):
            raise InvalidInputError("a quintic needs 6 finite coefficients")
        if not self.t_lo < self.t_hi:
            raise InvalidInputError("segment domain must have t_lo < t_hi")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t, order=0):
        # Horner on the differentiated coefficients
        c = self.coeffs
        for _ in range(order):
            c = c[1:] * np.arange(1, c.size)
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t) + c[-1]
        for a in c[-2::-1]:
            out = out * t + a
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class PiecewiseQuintic:
    segments: Tuple[QuinticSegment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        if len(segs) != 4:
            raise InvalidInputError("a cycle has exactly four segments")
        if segs[0].t_lo != 0.0:
            raise InvalidInputError("the first segment must start at t = 0")
        for a, b in zip(segs, segs[1:]):
            if a.t_hi != b.t_lo:
                raise InvalidInputError("segment domains must abut")
        object.__setattr__(self, "segments", segs)

    @property
    def breakpoints(self):
        return np.array([s.t_lo for s in self.segments] + [self.segments[-1].t_hi])

    @property
    def duration(self):
        return self.segments[-1].t_hi

    def __call__(self, t, order=0):
        return evaluate(self, t, order)


def solve_half_cycle(conditions: Sequence[float], times: Sequence[float]) -> np.ndarray:
    """Coefficients of the two quintics around one via point.

    Parameters
    ----------
    conditions : sequence of 12 floats
        Right-hand side in the row order of the module docstring; entries 6
        and 7 (the continuity rows) are normally 0.
    times : (t0, tv, tf)
        Start, via and end times in absolute cycle time.

    Returns
    -------
    ndarray, shape (12,)
        ``a0..a5`` of the first segment followed by those of the second.
    """
    q = np.asarray(conditions, dtype=np.float64)
    if q.shape != (12,):
        raise InvalidInputError("a half-cycle needs exactly 12 conditions")
    t0, tv, tf = (float(t) for t in times)
    m = half_cycle_matrix(t0, tv, tf)
    with warnings.catch_warnings():
        # singularity is reported below through the condition estimate
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=True)
    rcond, info = dgecon(lu, np.linalg.norm(m, 1), norm="1")
    if info != 0 or not rcond >= RCOND_MIN:
        raise SingularSystemError(
            f"half-cycle system singular for times {t0, tv, tf} (rcond={rcond:.3g})")
    return lu_solve((lu, piv), q)


def half_cycle_matrix(t0: float, tv: float, tf: float) -> np.ndarray:
    z = np.zeros(6)
    rows = [np.r_[_basis(t0, k), z] for k in range(4)]
    rows += [np.r_[_basis(tv, 0), z], np.r_[z, _basis(tv, 0)]]
    rows += [np.r_[_basis(tv, k), -_basis(tv, k)] for k in (1, 2)]
    rows += [np.r_[z, _basis(tf, k)] for k in range(4)]
    return np.array(rows)


def plan_cycle(waypoints: CycleWaypoints, timing: CycleTiming = CycleTiming(),
               boundary_jerk: Sequence[float] = (0.0, 0.0, 0.0)) -> PiecewiseQuintic:
    """Four-segment quintic cycle through the five waypoints.

    Velocity and acceleration are zero at ``0``, ``t_f1`` and ``t_f2``.
    ``boundary_jerk`` gives the jerk (rad/s^3) at those same three instants;
    the extended-position value is shared by both half-cycles, so the
    trajectory is continuous through jerk at ``t_f1``.
    """
    j0, j1, j2 = (float(j) for j in boundary_jerk)
    w = waypoints
    tm = timing
    first = solve_half_cycle(
        [w.start, 0.0, 0.0, j0, w.via1, w.via1, 0.0, 0.0, w.extended, 0.0, 0.0, j1],
        (0.0, tm.t_v1, tm.t_f1))
    second = solve_half_cycle(
        [w.extended, 0.0, 0.0, j1, w.via2, w.via2, 0.0, 0.0, w.end, 0.0, 0.0, j2],
        (tm.t_f1, tm.t_v2, tm.t_f2))
    knots = tm.knots
    coeffs = (first[:6], first[6:], second[:6], second[6:])
    return PiecewiseQuintic(tuple(QuinticSegment(c, knots[i], knots[i + 1])
                                  for i, c in enumerate(coeffs)))


def evaluate(traj: PiecewiseQuintic, t, order: int = 0):
    """Position (order 0) or its first three time derivatives.

    Interior breakpoints belong to the segment on their right; ``t_f2``
    belongs to the last segment. Accepts scalars or arrays.
    """
    if order not in (0, 1, 2, 3):
        raise InvalidInputError("order must be 0, 1, 2 or 3")
    ts = np.asarray(t, dtype=np.float64)
    if np.any(ts < 0.0) or np.any(ts > traj.duration) or np.any(np.isnan(ts)):
        raise InvalidInputError(f"time outside [0, {traj.duration}]")
    idx = np.searchsorted(traj.breakpoints[1:-1], ts, side="right")
    if ts.ndim == 0:
        return traj.segments[int(idx)](float(ts), order)
    out = np.empty_like(ts)
    for k, seg in enumerate(traj.segments):
        sel = idx == k
        if np.any(sel):
            out[sel] = seg(ts[sel], order)
    return out


@dataclass(frozen=True, eq=False)
class ProfileSamples:
    """Uniformly sampled trajectory in rad, rad/s and rad/s^2."""

    t: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray


def sample_times(duration: float, rate: float) -> np.ndarray:
    """Uniform grid over ``[0, duration]`` with both endpoints.

    The number of intervals is ``round(duration * rate)`` (at least one), so
    the spacing matches ``1 / rate`` whenever the duration is a whole
    number of periods.
    """
    if not rate > 0:
        raise InvalidInputError(f"sampling rate must be positive, got {rate!r}")
    n = max(1, int(round(duration * rate)))
    return duration * np.arange(n + 1) / n


def sample(traj: PiecewiseQuintic, rate: float) -> ProfileSamples:
    t = sample_times(traj.duration, rate)
    return ProfileSamples(t, evaluate(traj, t, 0), evaluate(traj, t, 1), evaluate(traj, t, 2))


def waypoints_from_states(states, timing: CycleTiming = CycleTiming()):
    """Cycle waypoints per crank from joint states along a flexion-to-extension path.

    The cycle starts and ends at ``states[0]``, is fully extended at
    ``states[-1]`` and passes through the same via state on both halves, the
    one whose index matches ``t_v1 / t_f1`` of the way along the path.

    Returns
    -------
    dict
        ``{"theta1": CycleWaypoints, "theta2": CycleWaypoints}``.
    """
    states = list(states)
    if len(states) < 2:
        raise InvalidInputError("need at least two joint states")
    via = states[int(round((len(states) - 1) * timing.t_v1 / timing.t_f1))]
    picks = (states[0], via, states[-1], via, states[0])
    return {j: CycleWaypoints(*(getattr(s, j) for s in picks)) for j in ("theta1", "theta2")}
