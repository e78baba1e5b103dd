"""
smrep/sim/agent.py
──────────────────
The point agent: five range sensors, (translate, then rotate) kinematics, and the
random exploration policy with its turn-around reflex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from smrep.sim.environment import Environment
from smrep.sim.geometry import check_free_point, ray_cast_many, wrap_angle

SENSOR_ANGLES = np.array([-0.6, -0.3, 0.0, 0.3, 0.6])
SENSOR_RANGE = 10.0
TURN_THRESHOLD = 1.0
MAX_FORWARD = 1.0
SMALL_TURN = math.pi / 6
TURN_AROUND_SPREAD = math.pi / 10
CLAMP_MARGIN = 1e-6

SensorReading = np.ndarray  # shape (5,), ordered by ray angle -0.6 .. +0.6


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta])

    @classmethod
    def from_array(cls, values) -> "Pose":
        return cls(float(values[0]), float(values[1]), float(values[2]))


@dataclass(frozen=True)
class MotorCommand:
    d: float  # forward translation
    r: float  # rotation applied after the translation

    def as_array(self) -> np.ndarray:
        return np.array([self.d, self.r])


def ray_cast(env: Environment, origin, angle: float, max_range: float) -> float:
    """Analytic distance from ``origin`` along ``angle`` to the nearest wall, clipped to max_range."""
    if max_range <= 0:
        raise ValueError(f"max_range must be positive, got {max_range}")
    check_free_point(env.segments, env.size, origin)
    return float(ray_cast_many(env.segments, origin, np.array([angle]), max_range)[0])


def sense(env: Environment, pose: Pose) -> SensorReading:
    origin = (pose.x, pose.y)
    check_free_point(env.segments, env.size, origin)
    return ray_cast_many(env.segments, origin, pose.theta + SENSOR_ANGLES, SENSOR_RANGE)


def step_agent(env: Environment, pose: Pose, motor: MotorCommand) -> tuple[Pose, bool]:
    """
    Translate by ``d`` along the heading, then rotate by ``r``.
    Returns the new pose and whether the translation had to be clamped short of a wall.
    """
    travel = motor.d
    clamped = False
    if travel > 0:
        hit = ray_cast(env, (pose.x, pose.y), pose.theta, max_range=2.0 * travel + 1.0)
        if hit <= travel:
            travel = max(0.0, hit - CLAMP_MARGIN)
            clamped = True
    x = pose.x + travel * math.cos(pose.theta)
    y = pose.y + travel * math.sin(pose.theta)
    theta = float(wrap_angle(pose.theta + motor.r))
    return Pose(x, y, theta), clamped


def apply_motor(env: Environment, pose: Pose, motor: MotorCommand) -> Pose:
    return step_agent(env, pose, motor)[0]


def behavior_step(reading: SensorReading, rng: np.random.Generator) -> MotorCommand:
    """
    Exploration policy.  Any sensor below 1 unit triggers a turn-around (no translation,
    rotation ~ U(pi - pi/10, pi + pi/10)); otherwise move forward d ~ U(0, 1) and turn
    r ~ U(-pi/6, pi/6), drawn in that order.
    """
    if float(np.min(reading)) < TURN_THRESHOLD:
        r = rng.uniform(math.pi - TURN_AROUND_SPREAD, math.pi + TURN_AROUND_SPREAD)
        return MotorCommand(0.0, float(wrap_angle(r)))
    d = rng.uniform(0.0, MAX_FORWARD)
    r = rng.uniform(-SMALL_TURN, SMALL_TURN)
    return MotorCommand(float(d), float(r))


def perceived_points(reading: SensorReading, max_range: float = SENSOR_RANGE) -> np.ndarray:
    """Ray endpoints, in the agent frame (x forward), for the sensors that hit something."""
    reading = np.asarray(reading, dtype=float)
    hit = reading < max_range
    angles = SENSOR_ANGLES[hit]
    return np.column_stack([reading[hit] * np.cos(angles), reading[hit] * np.sin(angles)])
