import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fivebar.actuation import (MotorCalibration, SetpointSchedule, counts_to_degrees,
                               degrees_to_counts, round_half_away, schedule_from_plan,
                               simulate_encoder_playback)
from fivebar.errors import InvalidInputError
from fivebar.planner import CycleWaypoints, plan_cycle

from conftest import M1_DEG, M2_DEG

M1 = MotorCalibration(4.269, 83.07)
M2 = MotorCalibration(7.710, 153.55)


def test_fit_matches_shipped_constants():
    assert MotorCalibration.fit(83.07, 35.99, 201).counts_per_degree == pytest.approx(4.269, abs=5e-4)
    assert MotorCalibration.fit(153.55, 104.39, 379).counts_per_degree == pytest.approx(7.710, abs=5e-4)
    with pytest.raises(InvalidInputError):
        MotorCalibration.fit(10.0, 10.0, 5)
    with pytest.raises(InvalidInputError):
        MotorCalibration(0.0, 10.0)


def test_encoder_fixture_rows():
    assert degrees_to_counts(M1, 83.07) == 0
    assert degrees_to_counts(M1, 35.99) == 201
    assert degrees_to_counts(M2, 104.39) == 379
    assert counts_to_degrees(M1, 0) == 83.07
    assert abs(counts_to_degrees(M1, 201) - 35.99) <= 0.5 / 4.269


def test_round_half_away_from_zero():
    assert [round_half_away(v) for v in (0.5, 1.5, 2.5, -0.5, -2.5, 0.49)] == [1, 2, 3, -1, -3, 0]


def test_monotone_decreasing_angle_increases_counts():
    angles = np.linspace(100, 20, 500)
    assert np.all(np.diff(degrees_to_counts(M1, angles)) >= 0)
    flipped = MotorCalibration(4.269, 83.07, -1)
    assert degrees_to_counts(flipped, 35.99) == -201


@given(st.floats(-360, 360), st.floats(0.5, 50), st.floats(-180, 180), st.sampled_from([1, -1]))
def test_round_trip_within_half_count(angle, cpd, zero, direction):
    cal = MotorCalibration(cpd, zero, direction)
    back = counts_to_degrees(cal, degrees_to_counts(cal, angle))
    assert abs(back - angle) <= 0.5 / cpd * (1 + 1e-9)


def plans():
    return {"m1": plan_cycle(CycleWaypoints.from_degrees(M1_DEG)),
            "m2": plan_cycle(CycleWaypoints.from_degrees(M2_DEG))}


def test_schedule_at_control_times():
    s = schedule_from_plan(plans(), {"m1": M1, "m2": M2}, 0.4)
    np.testing.assert_array_equal(s.t, [0, 2.5, 5, 7.5, 10])
    assert s.counts["m1"][1] == 201 and s.counts["m1"][3] == 201
    assert s.counts["m2"][1] == 379 and s.counts["m2"][3] == 379
    assert s.counts["m1"][0] == s.counts["m1"][4] == 0


def test_schedule_zero_motion_and_rate_doubling():
    still = {"m1": plan_cycle(CycleWaypoints.from_degrees([83.07] * 5))}
    s = schedule_from_plan(still, {"m1": M1}, 10.0)
    assert np.all(s.counts["m1"] == 0)
    a = schedule_from_plan(plans(), {"m1": M1, "m2": M2}, 5.0)
    b = schedule_from_plan(plans(), {"m1": M1, "m2": M2}, 10.0)
    assert b.t.size == 2 * a.t.size - 1
    np.testing.assert_array_equal(b.counts["m2"][::2], a.counts["m2"])
    with pytest.raises(InvalidInputError):
        schedule_from_plan(plans(), {"m1": M1}, 5.0)


def test_schedule_validation():
    with pytest.raises(InvalidInputError):
        SetpointSchedule([0.0, 0.0], {"m1": [1, 2]})
    with pytest.raises(InvalidInputError):
        SetpointSchedule([0.0, 1.0], {"m1": [1, 2.5]})


def test_playback_lag_zero_is_exact():
    s = schedule_from_plan(plans(), {"m1": M1, "m2": M2}, 20.0)
    out = simulate_encoder_playback(s, 0.0)
    for m in s.counts:
        np.testing.assert_array_equal(out.counts[m], s.counts[m])


def test_playback_step_response():
    tau = 0.2
    t = np.arange(0, 11) * tau
    out = simulate_encoder_playback(SetpointSchedule(t, {"m1": np.full(t.size, 100)}), tau)
    # 100 * (1 - 1/e) = 63.2
    assert abs(out.counts["m1"][1] - 100 * (1 - math.exp(-1))) <= 1
    assert out.counts["m1"][0] == 0


def test_playback_settles_within_five_time_constants():
    tau = 0.1
    t = np.linspace(0, 1.0, 101)
    out = simulate_encoder_playback(SetpointSchedule(t, {"m1": np.full(t.size, 60)}), tau)
    assert np.all(out.counts["m1"][t >= 5 * tau - 1e-12] == 60)
    with pytest.raises(InvalidInputError):
        simulate_encoder_playback(SetpointSchedule(t, {"m1": np.full(t.size, 60)}), -1.0)
