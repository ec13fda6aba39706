"""Link angle <-> encoder count mapping, setpoint schedules, playback model."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from .errors import InvalidInputError
from .planner import PiecewiseQuintic, evaluate, sample_times


@dataclass(frozen=True)
class MotorCalibration:
    """Affine encoder map ``counts = direction * (zero_angle_deg - angle) * counts_per_degree``.

    With ``direction = +1`` the count grows as the link angle drops below
    its zero angle (flexion pose at count 0).
    """

    counts_per_degree: float
    zero_angle_deg: float
    direction: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.counts_per_degree) and self.counts_per_degree > 0):
            raise InvalidInputError("counts_per_degree must be positive")
        if self.direction not in (1, -1):
            raise InvalidInputError("direction must be +1 or -1")

    @classmethod
    def fit(cls, zero_angle_deg, angle_deg, counts, direction=1):
        """Calibration through ``(zero_angle_deg, 0)`` and ``(angle_deg, counts)``."""
        span = direction * (zero_angle_deg - angle_deg)
        if span == 0 or counts / span <= 0:
            raise InvalidInputError("calibration points do not give a positive slope")
        return cls(counts / span, zero_angle_deg, direction)


def round_half_away(x):
    """Round to the nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return out.astype(np.int64) if out.ndim else int(out)


def degrees_to_counts(cal: MotorCalibration, angle):
    return round_half_away(cal.direction * (cal.zero_angle_deg - np.asarray(angle, dtype=np.float64))
                           * cal.counts_per_degree)


def counts_to_degrees(cal: MotorCalibration, counts):
    out = cal.zero_angle_deg - cal.direction * np.asarray(counts, dtype=np.float64) / cal.counts_per_degree
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class SetpointSchedule:
    """Integer encoder targets per motor on a shared time grid."""

    t: np.ndarray
    counts: Dict[str, np.ndarray]

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64)
        if t.ndim != 1 or t.size < 1:
            raise InvalidInputError("schedule needs at least one time stamp")
        if np.any(np.diff(t) <= 0):
            raise InvalidInputError("schedule time stamps must be strictly increasing")
        counts = {}
        for motor, c in self.counts.items():
            arr = np.asarray(c)
            if arr.shape != t.shape:
                raise InvalidInputError(f"motor {motor}: one count per time stamp required")
            if not np.issubdtype(arr.dtype, np.integer):
                if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
                    raise InvalidInputError(f"motor {motor}: counts must be integers")
            counts[motor] = arr.astype(np.int64)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "counts", counts)

    @property
    def motors(self):
        return list(self.counts)


def schedule_from_plan(plans: Mapping[str, PiecewiseQuintic],
                       cals: Mapping[str, MotorCalibration], rate: float) -> SetpointSchedule:
    """Sample each motor's plan at ``rate`` Hz and convert to counts."""
    if set(plans) != set(cals):
        raise InvalidInputError("need exactly one calibration per planned motor")
    durations = {p.duration for p in plans.values()}
    if len(durations) != 1:
        raise InvalidInputError("all motor plans must share one cycle duration")
    t = sample_times(durations.pop(), rate)
    counts = {m: degrees_to_counts(cals[m], np.degrees(evaluate(plans[m], t)))
              for m in plans}
    return SetpointSchedule(t, counts)


def simulate_encoder_playback(schedule: SetpointSchedule, lag_time_constant: float,
                              initial_counts: float = 0.0) -> SetpointSchedule:
    """First-order-lag response of each motor to the setpoint staircase.

    The setpoint at ``t[k]`` is the target driven over ``(t[k-1], t[k]]``.
    The motor state starts at ``initial_counts`` (encoders zeroed at the
    flexion pose) and is reported rounded to whole counts at every schedule
    time. A zero time constant reproduces the schedule exactly.
    """
    tau = float(lag_time_constant)
    if not tau >= 0:
        raise InvalidInputError("lag time constant must be non-negative")
    if tau == 0:
        return SetpointSchedule(schedule.t.copy(), {m: c.copy() for m, c in schedule.counts.items()})
    decay = np.exp(-np.diff(schedule.t) / tau)
    achieved = {}
    for motor, target in schedule.counts.items():
        y = np.empty(target.size)
        y[0] = initial_counts
        for k in range(1, target.size):
            y[k] = target[k] + (y[k - 1] - target[k]) * decay[k - 1]
        achieved[motor] = round_half_away(y)
    return SetpointSchedule(schedule.t.copy(), achieved)
