"""Dimensional synthesis of the five-bar against a desired fingertip path.

The design vector holds the three link lengths and the start/end angles of
both cranks. During evaluation the cranks sweep linearly from their start to
their end angles across the N desired samples, and the tracking error is the
mean Euclidean distance between the traced coupler point and the desired
point. The optimizer is a projected gradient method on the bound-normalized
design space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import List, Tuple

import numpy as np

from . import kernels
from .errors import InvalidInputError, UnreachableTargetError
from .mechanism import (ELBOWS_UP, ElbowConfig, JointState, MechanismParams,
                        PlanarPath, inverse_kinematics)

# added to E for every sample whose crank angles admit no coupler point
INFEASIBLE_PENALTY_MM = 1e3
# weight of squared constraint excess in the search merit
CONSTRAINT_WEIGHT_MM = 1e4


@dataclass(frozen=True)
class DesignVector:
    """Lengths in mm, crank angles in rad."""

    l1: float
    l2: float
    l0: float
    theta1_start: float
    theta1_end: float
    theta2_start: float
    theta2_end: float

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise InvalidInputError(f"design component {f.name} is not finite")

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))

    @classmethod
    def from_degrees(cls, l1, l2, l0, theta1_start, theta1_end, theta2_start, theta2_end):
        return cls(l1, l2, l0, *map(math.radians,
                                    (theta1_start, theta1_end, theta2_start, theta2_end)))

    def to_array(self):
        return np.array([getattr(self, f.name) for f in fields(self)])

    @property
    def params(self):
        return MechanismParams(self.l0, self.l1, self.l2)

    def sweep(self, n):
        """Crank angles of the linear schedule at ``n`` samples."""
        if n == 1:
            return np.array([self.theta1_start]), np.array([self.theta2_start])
        u = np.arange(n) / (n - 1.0)
        return (self.theta1_start + u * (self.theta1_end - self.theta1_start),
                self.theta2_start + u * (self.theta2_end - self.theta2_start))

    def sweep_states(self, n):
        th1, th2 = self.sweep(n)
        return [JointState(float(a), float(b)) for a, b in zip(th1, th2)]


FIELD_NAMES = tuple(f.name for f in fields(DesignVector))
LENGTH_FIELDS = ("l1", "l2", "l0")

# reference optimum of the finger rehabilitator; default design
REFERENCE_DESIGN = DesignVector.from_degrees(101.09, 108.67, 101.20, 153.55, 92.37, 83.07, 40.44)


@dataclass(frozen=True)
class Bounds:
    lower: DesignVector
    upper: DesignVector

    def __post_init__(self):
        if np.any(self.lower.to_array() > self.upper.to_array()):
            raise InvalidInputError("lower bound exceeds upper bound")
        for name in LENGTH_FIELDS:
            if getattr(self.lower, name) <= 0:
                raise InvalidInputError(f"lower bound of {name} must be positive")

    @classmethod
    def default(cls, length_mm=(20.0, 200.0), angle_deg=(0.0, 180.0)):
        lo_a, hi_a = map(math.radians, angle_deg)
        return cls(DesignVector(*[length_mm[0]] * 3, *[lo_a] * 4),
                   DesignVector(*[length_mm[1]] * 3, *[hi_a] * 4))

    def contains(self, design: DesignVector):
        v = design.to_array()
        return bool(np.all(v >= self.lower.to_array()) and np.all(v <= self.upper.to_array()))


@dataclass(frozen=True)
class SynthesisOptions:
    max_iter: int = 150
    max_evals: int = 2000
    tol: float = 1e-6
    # central-difference step in normalized (unit box) coordinates
    fd_step: float = 1e-6
    armijo: float = 1e-4
    shrink: float = 0.5
    min_step: float = 1e-16


@dataclass(frozen=True)
class ConstraintReport:
    max_abs_r1: float
    max_abs_r2: float
    infeasible_samples: int
    geometric_ok: bool


@dataclass
class OptimizationResult:
    """Outcome of one synthesis run.

    ``error_mm`` is the tracking error of ``best``. ``history`` lists
    ``(iteration, merit)`` for every accepted iterate; the merit equals the
    tracking error whenever the reach and elbow constraints hold.
    """

    best: DesignVector
    error_mm: float
    history: List[Tuple[int, float]]
    evaluations: int
    converged: bool
    constraint_report: ConstraintReport
    stop_reason: str = ""


def _points(desired):
    if isinstance(desired, PlanarPath):
        return desired.points
    pts = np.asarray(desired, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 1:
        raise InvalidInputError("desired path is empty")
    return pts


def _error_terms(v, dx, dz):
    l1, l2, l0, a0, a1, b0, b1 = v
    dist, n_bad, h_excess = kernels.tracking_terms(l0, l1, l2, a0, a1, b0, b1, dx, dz)
    return dist / dx.shape[0] + INFEASIBLE_PENALTY_MM * n_bad, h_excess


def objective_error(design: DesignVector, desired) -> float:
    """Mean distance (mm) between the traced sweep and the desired samples.

    Samples where the sweep has no coupler point add ``1e3`` mm each instead
    of a distance.
    """
    pts = _points(desired)
    v = design.to_array()
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("design vector has non-finite components")
    return _error_terms(v, np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]))[0]


def _merit(v, dx, dz):
    err, h_excess = _error_terms(v, dx, dz)
    l1, l2, l0 = v[:3]
    e1, e2, _, _ = kernels.reach_terms(l0, l1, l2, dx, dz)
    return err + CONSTRAINT_WEIGHT_MM * (e1 + e2 + h_excess)


def constraint_report(design: DesignVector, desired) -> ConstraintReport:
    pts = _points(desired)
    dx, dz = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])
    _, n_bad, _ = kernels.tracking_terms(design.l0, design.l1, design.l2,
                                         design.theta1_start, design.theta1_end,
                                         design.theta2_start, design.theta2_end, dx, dz)
    _, _, m1, m2 = kernels.reach_terms(design.l0, design.l1, design.l2, dx, dz)
    return ConstraintReport(m1, m2, int(n_bad), bool(n_bad == 0 and m1 < 1.0 and m2 < 1.0))


def synthesize(desired, bounds: Bounds, init: DesignVector,
               opts: SynthesisOptions = SynthesisOptions()) -> OptimizationResult:
    """Minimize the tracking error inside ``bounds`` starting from ``init``.

    Projected gradient descent in coordinates normalized to the unit box.
    Gradients are central differences; the trial step alternates between the
    two Barzilai-Borwein lengths and is backtracked until the Armijo
    condition holds, so accepted iterates never increase the merit. The merit
    is the tracking error plus a quadratic penalty on reach-ratio and
    elbow-distance violations (zero on feasible designs).

    Stops when the budget runs out, the step underflows, or an accepted step
    improves the merit by less than ``opts.tol``.
    """
    if not bounds.contains(init):
        raise InvalidInputError("initial design lies outside the bounds")
    if opts.max_iter < 0 or opts.max_evals < 0:
        raise InvalidInputError("budgets must be non-negative")
    pts = _points(desired)
    dx, dz = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])

    lo, hi = bounds.lower.to_array(), bounds.upper.to_array()
    span = np.where(hi > lo, hi - lo, 1.0)
    free = hi > lo
    n_var = lo.size

    def unscale(y):
        return lo + y * span

    evaluations = 0

    def f(y):
        nonlocal evaluations
        evaluations += 1
        return _merit(unscale(y), dx, dz)

    def finish(y, fy, converged, reason):
        best = DesignVector.from_array(unscale(y))
        return OptimizationResult(best, objective_error(best, pts), history, evaluations,
                                  converged, constraint_report(best, pts), reason)

    y = np.clip((init.to_array() - lo) / span, 0.0, 1.0)
    y[~free] = 0.0
    history: List[Tuple[int, float]] = []
    if opts.max_evals < 1 or opts.max_iter == 0:
        fy = _merit(init.to_array(), dx, dz)
        return OptimizationResult(init, objective_error(init, pts), [(0, fy)], evaluations,
                                  False, constraint_report(init, pts), "budget")
    fy = f(y)
    history.append((0, fy))

    h = opts.fd_step
    y_prev = g_prev = None
    for it in range(1, opts.max_iter + 1):
        if fy <= opts.tol:
            return finish(y, fy, True, "tolerance")
        if evaluations + 2 * int(free.sum()) + 1 > opts.max_evals:
            return finish(y, fy, False, "budget")

        g = np.zeros(n_var)
        for i in np.flatnonzero(free):
            yp, ym = y.copy(), y.copy()
            yp[i] = min(y[i] + h, 1.0)
            ym[i] = max(y[i] - h, 0.0)
            g[i] = (f(yp) - f(ym)) / (yp[i] - ym[i])

        # projected gradient; zero means a bound-constrained stationary point
        if not np.any(np.clip(y - g, 0.0, 1.0) != y):
            return finish(y, fy, True, "stationary")

        step = None
        if g_prev is not None:
            s, d = y - y_prev, g - g_prev
            sd = float(s @ d)
            if sd > 0:
                step = float(s @ s) / sd if it % 2 else sd / float(d @ d)
        if step is None:
            step = 1e-2 / max(float(np.max(np.abs(g))), 1e-12)

        accepted = False
        while evaluations < opts.max_evals and step >= opts.min_step:
            y_new = np.clip(y - step * g, 0.0, 1.0)
            f_new = f(y_new)
            if f_new <= fy + opts.armijo * float(g @ (y_new - y)):
                accepted = True
                break
            step *= opts.shrink
        if not accepted:
            reason = "budget" if evaluations >= opts.max_evals else "step underflow"
            return finish(y, fy, False, reason)

        y_prev, g_prev = y, g
        improvement = fy - f_new
        y, fy = y_new, f_new
        history.append((it, fy))
        if improvement < opts.tol:
            return finish(y, fy, True, "tolerance")
    return finish(y, fy, False, "budget")


def random_design(bounds: Bounds, rng: np.random.Generator):
    lo, hi = bounds.lower.to_array(), bounds.upper.to_array()
    return DesignVector.from_array(lo + rng.random(lo.size) * (hi - lo))


def multistart(desired, bounds: Bounds, init: DesignVector, restarts: int,
               seed: int = 0, opts: SynthesisOptions = SynthesisOptions()):
    """Best of ``init`` plus ``restarts`` uniform random starts in ``bounds``."""
    rng = np.random.default_rng(seed)
    best = synthesize(desired, bounds, init, opts)
    for _ in range(restarts):
        res = synthesize(desired, bounds, random_design(bounds, rng), opts)
        if res.error_mm < best.error_mm:
            best = res
    return best


def joint_waypoints(design: DesignVector, desired, elbows: ElbowConfig = ELBOWS_UP):
    """Inverse kinematics of every desired point with the design's lengths."""
    params = design.params
    out = []
    for i, p in enumerate(_points(desired)):
        try:
            out.append(inverse_kinematics(params, p, elbows))
        except UnreachableTargetError as exc:
            raise UnreachableTargetError(f"desired point {i}: {exc}", index=i) from None
    return out
