import math

import numpy as np
import pytest

from smrep.sim.agent import (
    SENSOR_RANGE,
    MotorCommand,
    Pose,
    apply_motor,
    behavior_step,
    perceived_points,
    ray_cast,
    sense,
    step_agent,
)
from smrep.sim.geometry import segments_cross, wrap_angle
from smrep.utils.exceptions import SimulationError


# ── ray_cast ──────────────────────────────────────────────────────────────


def test_center_of_square_is_out_of_range(square):
    for angle in np.linspace(-math.pi, math.pi, 13):
        assert ray_cast(square, (25.0, 25.0), angle, 10.0) == 10.0


def test_ray_hits_right_wall(square):
    assert ray_cast(square, (47.0, 25.0), 0.0, 10.0) == pytest.approx(3.0, abs=1e-12)
    assert ray_cast(square, (47.0, 25.0), 0.6, 10.0) == pytest.approx(3.0 / math.cos(0.6), abs=1e-12)


def test_ray_cast_rejects_origin_on_wall(rooms1):
    with pytest.raises(SimulationError, match="lies on wall"):
        ray_cast(rooms1, (10.0, 25.0), 0.0, 10.0)


def test_ray_cast_rejects_origin_outside(square):
    with pytest.raises(SimulationError, match="outside"):
        ray_cast(square, (-1.0, 25.0), 0.0, 10.0)


def test_ray_cast_needs_positive_range(square):
    with pytest.raises(ValueError):
        ray_cast(square, (25.0, 25.0), 0.0, 0.0)


def test_ray_cast_monotone_in_max_range(rooms2, rng):
    for _ in range(50):
        origin = rng.uniform(1.0, 49.0, size=2)
        if rooms2.clearance(origin[None, :])[0] < 0.1:
            continue
        angle = rng.uniform(-math.pi, math.pi)
        values = [ray_cast(rooms2, origin, angle, r) for r in (0.5, 2.0, 10.0, 80.0)]
        assert all(v <= r for v, r in zip(values, (0.5, 2.0, 10.0, 80.0)))
        assert values == sorted(values)


def _marched_distance(env, origin, angle, max_range, step=1e-4):
    t = np.arange(0.0, max_range + step, step)
    points = np.column_stack([origin[0] + t * math.cos(angle), origin[1] + t * math.sin(angle)])
    crossed = segments_cross(env.segments, points[:-1], points[1:])
    hits = np.flatnonzero(crossed)
    return min(t[hits[0]], max_range) if len(hits) else max_range


@pytest.mark.parametrize("layout", ["square", "rooms1", "rooms2"])
def test_ray_cast_matches_marching(layout, request, rng):
    env = request.getfixturevalue(layout)
    checked = 0
    while checked < 40:
        origin = rng.uniform(0.5, 49.5, size=2)
        if env.clearance(origin[None, :])[0] < 0.5:
            continue
        angle = rng.uniform(-math.pi, math.pi)
        analytic = ray_cast(env, origin, angle, SENSOR_RANGE)
        assert abs(analytic - _marched_distance(env, origin, angle, SENSOR_RANGE)) < 1e-3
        checked += 1


# ── sense ─────────────────────────────────────────────────────────────────


def test_sense_nothing_in_range(square):
    np.testing.assert_array_equal(sense(square, Pose(25.0, 25.0, 1.0)), np.full(5, 10.0))


def test_sense_facing_right_wall(square):
    c6, c3 = 3.0 / math.cos(0.6), 3.0 / math.cos(0.3)
    np.testing.assert_allclose(sense(square, Pose(47.0, 25.0, 0.0)), [c6, c3, 3.0, c3, c6], atol=1e-12)


def test_sense_facing_away(square):
    np.testing.assert_array_equal(sense(square, Pose(47.0, 25.0, math.pi)), np.full(5, 10.0))


def test_perceived_points_skip_out_of_range_rays():
    points = perceived_points(np.array([10.0, 10.0, 3.0, 10.0, 10.0]))
    np.testing.assert_allclose(points, [[3.0, 0.0]])


# ── apply_motor ───────────────────────────────────────────────────────────


def test_zero_motor_is_identity(square):
    pose = Pose(12.0, 30.0, 0.3)
    assert apply_motor(square, pose, MotorCommand(0.0, 0.0)) == pose


def test_translate_then_rotate(square):
    moved = apply_motor(square, Pose(10.0, 10.0, 0.0), MotorCommand(1.0, math.pi / 6))
    assert (moved.x, moved.y) == pytest.approx((11.0, 10.0))
    assert moved.theta == pytest.approx(math.pi / 6)


def test_translate_along_y(square):
    moved = apply_motor(square, Pose(10.0, 10.0, math.pi / 2), MotorCommand(0.5, 0.0))
    assert (moved.x, moved.y, moved.theta) == pytest.approx((10.0, 10.5, math.pi / 2))


def test_rotation_wraps(square):
    moved = apply_motor(square, Pose(10.0, 10.0, 3.0), MotorCommand(0.0, 1.0))
    assert moved.theta == pytest.approx(3.0 + 1.0 - 2 * math.pi)


def test_translation_clamped_short_of_wall(square):
    moved, clamped = step_agent(square, Pose(49.5, 25.0, 0.0), MotorCommand(1.0, 0.0))
    assert clamped
    assert 49.5 < moved.x < 50.0


def test_wrap_angle_range():
    values = wrap_angle(np.array([-math.pi, math.pi, 3 * math.pi, -3 * math.pi + 1e-3, 0.0]))
    assert np.all(values > -math.pi) and np.all(values <= math.pi)
    assert values[0] == pytest.approx(math.pi)


# ── behavior_step ─────────────────────────────────────────────────────────


def test_forward_branch(rng):
    for _ in range(200):
        motor = behavior_step(np.full(5, 10.0), rng)
        assert 0.0 <= motor.d < 1.0
        assert -math.pi / 6 <= motor.r <= math.pi / 6


def test_turn_around_branch(rng):
    for _ in range(200):
        motor = behavior_step(np.array([0.5, 10.0, 10.0, 10.0, 10.0]), rng)
        assert motor.d == 0.0
        assert math.pi - math.pi / 10 - 1e-12 <= abs(motor.r) <= math.pi


def test_threshold_is_strict(rng):
    motor = behavior_step(np.array([1.0, 10.0, 10.0, 10.0, 10.0]), rng)
    assert motor.r != 0.0 and abs(motor.r) <= math.pi / 6


def test_policy_is_seeded():
    a = [behavior_step(np.full(5, 10.0), np.random.default_rng(5)) for _ in range(3)]
    b = [behavior_step(np.full(5, 10.0), np.random.default_rng(5)) for _ in range(3)]
    assert a == b
