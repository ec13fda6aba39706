"""End-effector rotation angle: theory from the traced path versus IMU logs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import kernels
from .errors import DegenerateStepError, InfeasibleConfigurationError, InvalidInputError
from .mechanism import MechanismParams, PlanarPath
from .planner import PiecewiseQuintic, evaluate, sample_times

# displacements shorter than this (mm) in both components have no direction
STEP_MIN = 1e-12


@dataclass(frozen=True, eq=False)
class AngleSeries:
    """Angles in degrees against time (s) or sample index."""

    t: np.ndarray
    angle: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64)
        a = np.array(self.angle, dtype=np.float64)
        if t.shape != a.shape or t.ndim != 1:
            raise InvalidInputError("t and angle must be 1-D arrays of equal length")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("angles must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "angle", a)

    def __len__(self):
        return self.angle.size


@dataclass(frozen=True, eq=False)
class ImuLog:
    """Rotation angles (deg) about x, y and z with time stamps (s)."""

    t: np.ndarray
    zeta_x: np.ndarray
    zeta_y: np.ndarray
    zeta_z: np.ndarray

    def __post_init__(self):
        cols = [np.array(getattr(self, n), dtype=np.float64)
                for n in ("t", "zeta_x", "zeta_y", "zeta_z")]
        if any(c.shape != cols[0].shape or c.ndim != 1 for c in cols):
            raise InvalidInputError("IMU columns must be 1-D arrays of equal length")
        if np.any(np.diff(cols[0]) < 0):
            raise InvalidInputError("IMU time stamps must be non-decreasing")
        for name, c in zip(("t", "zeta_x", "zeta_y", "zeta_z"), cols):
            object.__setattr__(self, name, c)

    def __len__(self):
        return self.t.size

    def axis(self, name="y"):
        return AngleSeries(self.t, getattr(self, f"zeta_{name}"))

    def slice(self, sel):
        return ImuLog(self.t[sel], self.zeta_x[sel], self.zeta_y[sel], self.zeta_z[sel])


@dataclass(frozen=True, eq=False)
class CycleError:
    series: AngleSeries
    rms: float
    max_abs: float


def relative_vectors(path: PlanarPath) -> np.ndarray:
    """Displacements between consecutive points, shape ``(N-1, 2)``.

    Column 0 is the x step ``v_r``, column 1 the z step ``v_p``.
    """
    pts = path.points if isinstance(path, PlanarPath) else np.asarray(path, dtype=np.float64)
    if pts.shape[0] < 2:
        raise InvalidInputError("need at least two points for a displacement")
    return np.diff(pts, axis=0)


def theoretical_rotation(path: PlanarPath) -> AngleSeries:
    """Inclination ``atan(|v_p / v_r|)`` of each step, in degrees.

    Step ``i`` (from point ``i-1`` to ``i``) is stamped with the time of
    point ``i``, or with index ``i`` when the path has no time stamps.
    Vertical steps give 90 degrees.
    """
    v = relative_vectors(path)
    still = (np.abs(v[:, 0]) < STEP_MIN) & (np.abs(v[:, 1]) < STEP_MIN)
    if np.any(still):
        i = int(np.flatnonzero(still)[0]) + 1
        raise DegenerateStepError(f"points {i - 1} and {i} coincide")
    angle = np.degrees(np.arctan2(np.abs(v[:, 1]), np.abs(v[:, 0])))
    t = path.t[1:] if getattr(path, "t", None) is not None else np.arange(1, v.shape[0] + 1)
    return AngleSeries(t, angle)


def align_offset(series: AngleSeries, window: int = 1) -> AngleSeries:
    """Shift the series so it starts at zero.

    The offset is the mean of the first ``window`` values; the default
    ``window=1`` subtracts exactly the first value.
    """
    if len(series) == 0:
        raise InvalidInputError("cannot align an empty series")
    if window < 1:
        raise InvalidInputError("window must be at least one sample")
    offset = series.angle[:window].mean()
    return AngleSeries(series.t, series.angle - offset)


def split_cycles(log: ImuLog, period: float) -> List[ImuLog]:
    """Consecutive windows ``[t0 + k*period, t0 + (k+1)*period)``.

    A window counts as complete when the log reaches its end to within one
    nominal sample interval; incomplete trailing windows are dropped.
    """
    if not (math.isfinite(period) and period > 0):
        raise InvalidInputError(f"cycle period must be positive, got {period!r}")
    if len(log) == 0:
        return []
    t0 = log.t[0]
    dt = float(np.median(np.diff(log.t))) if len(log) > 1 else 0.0
    # tolerance against accumulated rounding in the time stamps
    n_cycles = int(math.floor((log.t[-1] - t0 + dt) / period + 1e-9))
    rel = log.t - t0
    k = np.floor(rel / period + 1e-9)
    return [log.slice(k == c) for c in range(n_cycles)]


def cycle_error(measured: AngleSeries, theoretical: AngleSeries) -> CycleError:
    """Pointwise ``measured - theoretical`` on the theoretical grid.

    ``measured`` is linearly interpolated onto ``theoretical.t``; both are
    expected to be offset-aligned already.
    """
    if len(measured) == 0 or len(theoretical) == 0:
        raise InvalidInputError("cannot compare empty series")
    if len(measured) == 1:
        m = np.full(len(theoretical), measured.angle[0])
    else:
        m = np.interp(theoretical.t, measured.t, measured.angle)
    err = m - theoretical.angle
    return CycleError(AngleSeries(theoretical.t, err),
                      float(np.sqrt(np.mean(err * err))), float(np.max(np.abs(err))))


def rotation_profile(params: MechanismParams, theta1_plan: PiecewiseQuintic,
                     theta2_plan: PiecewiseQuintic, rate: float,
                     t_end: Optional[float] = None) -> AngleSeries:
    """Theoretical rotation along the planned motion over ``[0, t_end]``.

    The crank plans are sampled at ``rate`` Hz, the coupler path is traced
    by forward kinematics and its step inclinations are returned against
    time. ``t_end`` defaults to the whole cycle; pass ``t_f1`` to restrict
    to the flexion-to-extension half.
    """
    duration = theta1_plan.duration if t_end is None else float(t_end)
    t = sample_times(duration, rate)
    x, z, ok = kernels.fk_batch(params.l0, params.l1, params.l2,
                                evaluate(theta1_plan, t), evaluate(theta2_plan, t))
    if not np.all(ok):
        i = int(np.flatnonzero(~ok)[0])
        raise InfeasibleConfigurationError(
            f"planned motion leaves the reachable region at t = {t[i]:.6g} s", index=i)
    return theoretical_rotation(PlanarPath(np.column_stack([x, z]), t))


def analyze_cycles(log: ImuLog, theoretical: AngleSeries, period: float,
                   axis: str = "y", baseline_s: float = 0.5) -> List[CycleError]:
    """Per-cycle error of the measured rotation against the theory.

    Each cycle is re-based to start at time zero and resampled onto the
    theoretical grid. The theory is aligned to start at zero; the measured
    curve is shifted so its mean over the first ``baseline_s`` seconds
    matches the aligned theory over the same samples. With noise-free data
    this is the same as starting both curves at zero, while sensor noise on
    the very first sample does not leak into the whole cycle.
    """
    theory = align_offset(theoretical)
    n_base = max(1, int(np.searchsorted(theory.t, theory.t[0] + baseline_s, side="right")))
    out = []
    for cyc in split_cycles(log, period):
        m = cyc.axis(axis)
        on_grid = np.interp(theory.t, m.t - m.t[0], m.angle)
        shift = on_grid[:n_base].mean() - theory.angle[:n_base].mean()
        out.append(cycle_error(AngleSeries(theory.t, on_grid - shift), theory))
    return out


def synthetic_imu_log(full_cycle: AngleSeries, n_cycles: int, rate: float,
                      noise_deg: float = 0.0, mount_offset_deg: float = 0.0,
                      seed: int = 0) -> ImuLog:
    """IMU log that repeats a theoretical full-cycle rotation profile.

    ``zeta_y`` follows ``full_cycle`` (linearly interpolated, periodic) plus
    a constant mounting offset and Gaussian noise; the x and z channels carry
    noise only.
    """
    rng = np.random.default_rng(seed)
    period = float(full_cycle.t[-1])
    n = int(round(n_cycles * period * rate))
    t = np.arange(n) / rate
    phase = np.mod(t, period)
    # the profile starts one step after t = 0; wrap its last value to the start
    tt = np.r_[0.0, full_cycle.t]
    aa = np.r_[full_cycle.angle[-1], full_cycle.angle]
    zy = np.interp(phase, tt, aa) + mount_offset_deg + noise_deg * rng.standard_normal(n)
    zx = noise_deg * rng.standard_normal(n)
    zz = noise_deg * rng.standard_normal(n)
    return ImuLog(t, zx, zy, zz)
