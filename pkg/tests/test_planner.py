import math

import numpy as np
import pytest

from fivebar.errors import InvalidInputError, SingularSystemError
from fivebar.planner import (CycleTiming, CycleWaypoints, PiecewiseQuintic, QuinticSegment,
                             evaluate, half_cycle_matrix, plan_cycle, sample,
                             solve_half_cycle, waypoints_from_states)

from conftest import CONTROL_TIMES, M1_DEG, M2_DEG
from oracles import central_difference


@pytest.fixture(params=[M1_DEG, M2_DEG], ids=["m1", "m2"])
def plan(request):
    return plan_cycle(CycleWaypoints.from_degrees(request.param)), request.param


def test_timing_and_waypoint_validation():
    with pytest.raises(InvalidInputError):
        CycleTiming(2.5, 2.5, 7.5, 10)
    with pytest.raises(InvalidInputError):
        CycleWaypoints(0.0, 0.1, 0.2, 0.1, 0.3)


def test_constant_half_cycle():
    c = solve_half_cycle([1.3, 0, 0, 0, 1.3, 1.3, 0, 0, 1.3, 0, 0, 0], (0.0, 2.5, 5.0))
    np.testing.assert_allclose(c, [1.3, 0, 0, 0, 0, 0, 1.3, 0, 0, 0, 0, 0], atol=1e-12)


def test_half_cycle_interpolates_m2_first_half():
    w = [math.radians(v) for v in (153.55, 104.39, 92.37)]
    c = solve_half_cycle([w[0], 0, 0, 0, w[1], w[1], 0, 0, w[2], 0, 0, 0], (0.0, 2.5, 5.0))
    first = QuinticSegment(c[:6], 0.0, 2.5)
    second = QuinticSegment(c[6:], 2.5, 5.0)
    got = [first(0.0), first(2.5), second(2.5), second(5.0)]
    np.testing.assert_allclose(np.degrees(got), [153.55, 104.39, 104.39, 92.37], rtol=0, atol=1e-9)


@pytest.mark.parametrize("times", [(0.0, 2.5, 5.0), (5.0, 7.5, 10.0), (0.0, 0.3, 7.0)])
def test_half_cycle_residual(times, rng):
    q = rng.normal(size=12)
    c = solve_half_cycle(q, times)
    m = half_cycle_matrix(*times)
    assert np.max(np.abs(m @ c - q)) / np.max(np.abs(q)) < 1e-9


def test_singular_timing():
    with pytest.raises(SingularSystemError):
        solve_half_cycle(np.ones(12), (0.0, 0.0, 5.0))


def test_plan_reproduces_waypoints(plan):
    traj, degs = plan
    np.testing.assert_allclose(np.degrees(evaluate(traj, CONTROL_TIMES)), degs, rtol=0, atol=1e-9)


def test_plan_boundary_conditions(plan):
    traj, degs = plan
    assert evaluate(traj, 0.0) == pytest.approx(math.radians(degs[0]), abs=1e-15)
    for t in (0.0, 10.0):
        for k in (1, 2):
            assert abs(evaluate(traj, t, k)) < 1e-9
    assert evaluate(traj, 0.0, 3) == pytest.approx(0.0, abs=1e-9)


def test_plan_continuity(plan):
    traj, _ = plan
    segs = traj.segments
    for i, b in enumerate((2.5, 5.0, 7.5)):
        for k in range(3):
            assert abs(segs[i](b, k) - segs[i + 1](b, k)) < 1e-9
    # jerk is shared at the half-cycle junction, free at the vias
    assert abs(segs[1](5.0, 3) - segs[2](5.0, 3)) < 1e-9
    assert abs(segs[0](2.5, 3) - segs[1](2.5, 3)) > 1e-3


def test_time_reversal_symmetry(plan):
    traj, _ = plan
    t = np.linspace(0, 10, 1001)
    np.testing.assert_allclose(np.degrees(evaluate(traj, t)), np.degrees(evaluate(traj, 10 - t)),
                               rtol=0, atol=1e-9)


def test_constant_cycle():
    traj = plan_cycle(CycleWaypoints(0.7, 0.7, 0.7, 0.7, 0.7))
    t = np.linspace(0, 10, 101)
    np.testing.assert_allclose(evaluate(traj, t), 0.7, atol=1e-12)
    np.testing.assert_allclose(evaluate(traj, t, 1), 0.0, atol=1e-12)


def test_boundary_jerk_is_honoured():
    traj = plan_cycle(CycleWaypoints.from_degrees(M1_DEG), boundary_jerk=(0.1, -0.2, 0.3))
    assert evaluate(traj, 0.0, 3) == pytest.approx(0.1, abs=1e-9)
    assert traj.segments[1](5.0, 3) == pytest.approx(-0.2, abs=1e-9)
    assert evaluate(traj, 5.0, 3) == pytest.approx(-0.2, abs=1e-9)
    assert evaluate(traj, 10.0, 3) == pytest.approx(0.3, abs=1e-9)


def test_breakpoint_ownership():
    segs = tuple(QuinticSegment([float(i), 0, 0, 0, 0, 0], lo, hi)
                 for i, (lo, hi) in enumerate([(0, 1), (1, 2), (2, 3), (3, 4)]))
    traj = PiecewiseQuintic(segs)
    assert [evaluate(traj, t) for t in (0, 1, 2, 3, 4)] == [0, 1, 2, 3, 3]
    with pytest.raises(InvalidInputError):
        evaluate(traj, 4.0001)
    with pytest.raises(InvalidInputError):
        evaluate(traj, -1e-9)
    with pytest.raises(InvalidInputError):
        evaluate(traj, 1.0, order=4)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_match_finite_differences(plan, order, rng):
    traj, _ = plan
    h = 1e-5
    knots = np.array([0, 2.5, 5, 7.5, 10])
    ts = rng.uniform(0, 10, 200)
    ts = ts[np.min(np.abs(ts[:, None] - knots), axis=1) > 1e-3][:100]
    analytic = evaluate(traj, ts, order)
    fd = central_difference(lambda t: evaluate(traj, t, order - 1), ts, h)
    scale = np.max(np.abs(evaluate(traj, np.linspace(0, 10, 2001), order)))
    # relative to the derivative's magnitude over the cycle
    assert np.max(np.abs(analytic - fd)) / scale < 1e-6


def test_sample_grid(plan):
    traj, degs = plan
    s = sample(traj, 0.4)
    np.testing.assert_array_equal(s.t, CONTROL_TIMES)
    np.testing.assert_allclose(np.degrees(s.theta), degs, atol=1e-9)
    ends = sample(traj, 0.1)
    np.testing.assert_array_equal(ends.t, [0.0, 10.0])
    with pytest.raises(InvalidInputError):
        sample(traj, 0.0)


def test_sample_doubling_rate(plan):
    traj, _ = plan
    a, b = sample(traj, 50.0), sample(traj, 100.0)
    assert b.t.size == 2 * a.t.size - 1
    np.testing.assert_array_equal(b.t[::2], a.t)
    np.testing.assert_array_equal(b.theta[::2], a.theta)


@pytest.mark.parametrize("rate", [3.0, 17.0, 100.0])
def test_sample_taylor_bound(plan, rate):
    traj, _ = plan
    dense = np.linspace(0, 10, 20001)
    vmax = np.max(np.abs(evaluate(traj, dense, 1)))
    amax = np.max(np.abs(evaluate(traj, dense, 2)))
    s = sample(traj, rate)
    dt = np.diff(s.t)
    assert np.all(np.abs(np.diff(s.theta)) < vmax * dt + amax * dt ** 2)


def test_waypoints_from_states():
    from fivebar.mechanism import JointState
    states = [JointState(0.1 * i, -0.2 * i) for i in range(11)]
    w = waypoints_from_states(states)
    assert w["theta1"].values == pytest.approx((0.0, 0.5, 1.0, 0.5, 0.0))
    assert w["theta2"].values == pytest.approx((0.0, -1.0, -2.0, -1.0, 0.0))
    late = waypoints_from_states(states, CycleTiming(4.0, 5.0, 6.0, 10.0))
    assert late["theta1"].via1 == pytest.approx(0.8)
    with pytest.raises(InvalidInputError):
        waypoints_from_states(states[:1])
