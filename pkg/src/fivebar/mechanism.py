"""Kinematics of the symmetric planar five-bar linkage.

Frame: fixed pivot A at the origin, fixed pivot E at ``(l0, 0)``, the
working plane is x-z with z pointing up. Crank angles are measured from
the +x axis. The coupler joint C is where the two coupler links meet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import (InfeasibleConfigurationError, InvalidInputError,
                     UnreachableTargetError)

# elbows closer than this (mm) leave the coupler direction undefined
H_MIN = kernels._pykernels.H_MIN


@dataclass(frozen=True)
class MechanismParams:
    """Link lengths in mm. Symmetry is structural: L4 = l1 and L3 = l2."""

    l0: float
    l1: float
    l2: float

    def __post_init__(self):
        for name in ("l0", "l1", "l2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be a positive finite length, got {v!r}")

    @property
    def l3(self):
        return self.l2

    @property
    def l4(self):
        return self.l1


@dataclass(frozen=True)
class ElbowConfig:
    """Branch signs of the passive elbows B and F (+1 is elbow up)."""

    b_sign: int = 1
    f_sign: int = 1

    def __post_init__(self):
        if self.b_sign not in (1, -1) or self.f_sign not in (1, -1):
            raise InvalidInputError("elbow signs must be +1 or -1")


ELBOWS_UP = ElbowConfig()


@dataclass(frozen=True)
class JointState:
    """Crank angles in radians, with an optional time stamp in seconds."""

    theta1: float
    theta2: float
    t: Optional[float] = None

    @classmethod
    def from_degrees(cls, theta1_deg, theta2_deg, t=None):
        return cls(math.radians(theta1_deg), math.radians(theta2_deg), t)

    def degrees(self):
        return math.degrees(self.theta1), math.degrees(self.theta2)


@dataclass(frozen=True, eq=False)
class PlanarPath:
    """Ordered end-effector samples ``points[i] = (x, z)`` in mm.

    ``t`` holds strictly increasing time stamps in seconds, or is None.
    """

    points: np.ndarray
    t: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError("points must have shape (N, 2)")
        if pts.shape[0] < 2:
            raise InvalidInputError("a path needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("path coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.t is not None:
            t = np.array(self.t, dtype=np.float64)
            if t.shape != (pts.shape[0],):
                raise InvalidInputError("need exactly one time stamp per point")
            if np.any(np.diff(t) <= 0):
                raise InvalidInputError("time stamps must be strictly increasing")
            t.setflags(write=False)
            object.__setattr__(self, "t", t)

    def __len__(self):
        return self.points.shape[0]

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def z(self):
        return self.points[:, 1]


@dataclass(frozen=True)
class FeasibilityReport:
    """Reachability of one target.

    ``r1``/``r2`` are the law-of-cosines ratios of the left and right crank
    chains, ``h`` the elbow separation of the inverse-kinematics solution
    (NaN when no solution exists). ``literal_r3_r4_ok`` evaluates the literal
    conditions ``|H| < 1`` and ``|sqrt(l2^2/H^2 - 1/4)| < 1``; they cannot
    hold for real-sized linkages and are reported for reference only.
    """

    r1: float
    r2: float
    h: float
    geometric_ok: bool
    literal_r3_r4_ok: bool


def elbow_points(params: MechanismParams, joints: JointState):
    """Positions of the passive elbows B (left chain) and F (right chain)."""
    b = (params.l1 * math.cos(joints.theta1), params.l1 * math.sin(joints.theta1))
    f = (params.l0 + params.l1 * math.cos(joints.theta2), params.l1 * math.sin(joints.theta2))
    return b, f


def elbow_distance(params: MechanismParams, joints: JointState) -> float:
    """Distance H between the elbows.

    Equals ``sqrt(l0^2 + 2 l0 l1 (cos t2 - cos t1) + 2 l1^2 (1 - cos(t1 - t2)))``.
    """
    (bx, bz), (fx, fz) = elbow_points(params, joints)
    return math.hypot(fx - bx, fz - bz)


def forward_kinematics(params: MechanismParams, joints: JointState):
    """Coupler point C for the given crank angles.

    C is the midpoint of the elbows offset along the left-hand normal of
    B->F by ``sqrt(l2^2 - H^2/4)``, i.e. the elbow-up intersection of the
    two coupler circles.

    Returns
    -------
    (x, z) : tuple of float
        Coupler point in mm.

    Raises
    ------
    InfeasibleConfigurationError
        If ``H > 2 l2`` (circles do not meet) or ``H < 1e-9`` mm.
    """
    l0, l1, l2 = params.l0, params.l1, params.l2
    c1, s1 = math.cos(joints.theta1), math.sin(joints.theta1)
    c2, s2 = math.cos(joints.theta2), math.sin(joints.theta2)
    dx = l0 + l1 * (c2 - c1)
    dz = l1 * (s2 - s1)
    h2 = dx * dx + dz * dz
    if h2 < H_MIN * H_MIN:
        raise InfeasibleConfigurationError("elbows coincide; coupler point undefined")
    if h2 > 4.0 * l2 * l2:
        raise InfeasibleConfigurationError(
            f"elbow distance {math.sqrt(h2):.6g} mm exceeds 2*l2 = {2 * l2:.6g} mm")
    k = math.sqrt(l2 * l2 / h2 - 0.25)
    return l1 * c1 + 0.5 * dx - dz * k, l1 * s1 + 0.5 * dz + dx * k


# theta2 = omega + THETA2_SIGMA_SIGN * sigma; -1 is the only choice for which
# forward_kinematics inverts inverse_kinematics (checked at import below)
THETA2_SIGMA_SIGN = -1


def _reach_ratios(params: MechanismParams, x: float, z: float):
    l0, l1, l2 = params.l0, params.l1, params.l2
    den = 2.0 * l1 * l2
    r1 = (l1 * l1 + l2 * l2 - (x * x + z * z)) / den
    r2 = (l2 * l2 + l1 * l1 - ((l0 - x) ** 2 + z * z)) / den
    return r1, r2


def _solve_ik(params, x, z, elbows):
    l0, l1, l2 = params.l0, params.l1, params.l2
    r1, r2 = _reach_ratios(params, x, z)
    if not (abs(r1) < 1.0 and abs(r2) < 1.0):
        return r1, r2, None
    gamma = math.atan2(z, x)
    omega = math.pi - math.atan2(z, l0 - x)
    phi = math.atan2(elbows.b_sign * math.sqrt(1.0 - r1 * r1), r1)
    alpha = math.atan2(elbows.f_sign * math.sqrt(1.0 - r2 * r2), r2)
    beta = math.atan2(l2 * math.sin(math.pi - phi), l1 + l2 * math.cos(math.pi - phi))
    sigma = math.atan2(l2 * math.sin(math.pi - alpha), l1 + l2 * math.cos(math.pi - alpha))
    return r1, r2, JointState(gamma + beta, omega + THETA2_SIGMA_SIGN * sigma)


def inverse_kinematics(params: MechanismParams, target: Sequence[float],
                       elbows: ElbowConfig = ELBOWS_UP) -> JointState:
    """Crank angles placing the coupler point at ``target = (x, z)``.

    Raises
    ------
    UnreachableTargetError
        If either crank chain cannot reach the target (``|r| >= 1``) or the
        solution would put both elbows on top of each other.
    """
    x, z = float(target[0]), float(target[1])
    r1, r2, joints = _solve_ik(params, x, z, elbows)
    if joints is None:
        raise UnreachableTargetError(
            f"target ({x:.6g}, {z:.6g}) out of reach: r1={r1:.6g}, r2={r2:.6g}")
    if elbow_distance(params, joints) < H_MIN:
        raise UnreachableTargetError(f"target ({x:.6g}, {z:.6g}) makes the elbows coincide")
    return joints


def feasibility(params: MechanismParams, target: Sequence[float],
                elbows: ElbowConfig = ELBOWS_UP) -> FeasibilityReport:
    x, z = float(target[0]), float(target[1])
    r1, r2, joints = _solve_ik(params, x, z, elbows)
    h = math.nan if joints is None else elbow_distance(params, joints)
    geometric_ok = joints is not None and H_MIN <= h <= 2.0 * params.l2
    if math.isnan(h) or h == 0.0:
        literal_ok = False
    else:
        literal_ok = abs(h) < 1.0 and abs(math.sqrt(max(params.l2 ** 2 / h ** 2 - 0.25, 0.0))) < 1.0
    return FeasibilityReport(r1, r2, h, bool(geometric_ok), bool(literal_ok))


def trace_path(params: MechanismParams, joints_series: Sequence[JointState]) -> PlanarPath:
    """Forward kinematics of every joint state, order and stamps preserved."""
    th1 = np.array([j.theta1 for j in joints_series], dtype=np.float64)
    th2 = np.array([j.theta2 for j in joints_series], dtype=np.float64)
    x, z, ok = kernels.fk_batch(params.l0, params.l1, params.l2, th1, th2)
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise InfeasibleConfigurationError(
            f"joint state {bad} is infeasible", index=bad)
    stamps = [j.t for j in joints_series]
    t = None if any(s is None for s in stamps) else np.array(stamps)
    return PlanarPath(np.column_stack([x, z]), t)


def scale_amplitude(path: PlanarPath, factor: float, anchor: Sequence[float]) -> PlanarPath:
    """Similarity transform ``p -> anchor + factor * (p - anchor)``."""
    if not factor > 0:
        raise InvalidInputError(f"scale factor must be positive, got {factor!r}")
    a = np.asarray(anchor, dtype=np.float64)
    return PlanarPath(a + factor * (path.points - a), path.t)


def _self_test():
    params = MechanismParams(101.20, 101.09, 108.67)
    probe = JointState.from_degrees(120.0, 60.0)
    back = inverse_kinematics(params, forward_kinematics(params, probe))
    if abs(back.theta1 - probe.theta1) > 1e-9 or abs(back.theta2 - probe.theta2) > 1e-9:
        raise RuntimeError(
            f"inverse kinematics sign convention broken: {probe} -> {back}")


_self_test()
