"""
smrep/dataset/trajectory.py
───────────────────────────
Sensorimotor trajectories: generation by the exploration policy, temporal splits,
and replay of a recorded motor stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from smrep.config import settings
from smrep.sim.agent import (
    MotorCommand,
    Pose,
    SensorReading,
    behavior_step,
    sense,
    step_agent,
)
from smrep.sim.environment import Environment
from smrep.sim.geometry import wrap_angle
from smrep.utils.exceptions import DatasetError
from smrep.utils.logger import setup_logger

logger = setup_logger(__name__)

START_CLEARANCE = 1.0
MIN_SPLIT_LENGTH = 10


@dataclass(frozen=True)
class SensorimotorRecord:
    sensors: SensorReading
    motor: MotorCommand
    pose: Optional[Pose]


@dataclass
class Trajectory:
    """
    Columnar storage of T records.  ``motors[t]`` is the command executed at step t,
    so ``poses[t + 1]`` follows from ``poses[t]`` and ``motors[t]``.
    ``poses`` is None when loaded for model consumption.
    """

    env: Environment
    seed: int
    sensors: np.ndarray
    motors: np.ndarray
    poses: Optional[np.ndarray] = None
    clamp_count: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def env_name(self) -> str:
        return self.env.name

    def __len__(self) -> int:
        return len(self.sensors)

    def record(self, t: int) -> SensorimotorRecord:
        pose = Pose.from_array(self.poses[t]) if self.poses is not None else None
        return SensorimotorRecord(self.sensors[t].copy(), MotorCommand(*map(float, self.motors[t])), pose)

    def __iter__(self) -> Iterator[SensorimotorRecord]:
        return (self.record(t) for t in range(len(self)))

    def window(self, steps: range) -> "Trajectory":
        """Contiguous sub-trajectory over ``steps`` (order preserved)."""
        sl = slice(steps.start, steps.stop)
        return Trajectory(
            env=self.env,
            seed=self.seed,
            sensors=self.sensors[sl],
            motors=self.motors[sl],
            poses=None if self.poses is None else self.poses[sl],
            clamp_count=self.clamp_count,
            meta=dict(self.meta),
        )

    def same_as(self, other: "Trajectory") -> bool:
        """Exact (bitwise) equality of every stored array and header field."""
        if (self.env, self.seed, self.clamp_count) != (other.env, other.seed, other.clamp_count):
            return False
        if (self.poses is None) != (other.poses is None):
            return False
        arrays = [(self.sensors, other.sensors), (self.motors, other.motors)]
        if self.poses is not None:
            arrays.append((self.poses, other.poses))
        return all(a.shape == b.shape and a.tobytes() == b.tobytes() for a, b in arrays)


@dataclass(frozen=True)
class DatasetSplits:
    train: range
    validation: range
    test: range


def _start_pose(env: Environment, rng: np.random.Generator) -> Pose:
    while True:
        x, y = rng.uniform(0.0, env.size, size=2)
        if env.clearance(np.array([[x, y]]))[0] >= START_CLEARANCE:
            theta = float(wrap_angle(rng.uniform(-math.pi, math.pi)))
            return Pose(float(x), float(y), theta)


def generate(env: Environment, steps: int, seed: int) -> Trajectory:
    """Run the exploration policy for ``steps`` steps; deterministic in (env, steps, seed)."""
    if steps < 2:
        raise DatasetError(f"steps must be >= 2, got {steps}")

    start_rng, policy_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    pose = _start_pose(env, start_rng)

    sensors = np.empty((steps, 5))
    motors = np.empty((steps, 2))
    poses = np.empty((steps, 3))
    clamps = 0

    logger.info(f"Generating {steps} steps in {env.name} (seed={seed})")
    for t in range(steps):
        reading = sense(env, pose)
        motor = behavior_step(reading, policy_rng)
        sensors[t] = reading
        motors[t] = (motor.d, motor.r)
        poses[t] = (pose.x, pose.y, pose.theta)
        pose, clamped = step_agent(env, pose, motor)
        clamps += clamped
        if (t + 1) % settings.progress_every == 0:
            logger.info(f"  {env.name}: {t + 1}/{steps} steps")

    if clamps:
        logger.warning(f"{clamps} translations were clamped short of a wall in {env.name}")
    return Trajectory(env=env, seed=seed, sensors=sensors, motors=motors, poses=poses, clamp_count=clamps)


def split(traj: Trajectory) -> DatasetSplits:
    """First 80% train, next 10% validation, last 10% test; boundaries floor(0.8T), floor(0.9T)."""
    T = len(traj)
    if T < MIN_SPLIT_LENGTH:
        raise DatasetError(f"trajectory of length {T} is too short to split (need >= {MIN_SPLIT_LENGTH})")
    a, b = (T * 8) // 10, (T * 9) // 10
    return DatasetSplits(train=range(0, a), validation=range(a, b), test=range(b, T))


def replay(traj: Trajectory, start: Optional[Pose] = None) -> Trajectory:
    """Re-simulate ``traj``'s motor stream from its first pose (or ``start``)."""
    if start is None:
        if traj.poses is None:
            raise DatasetError("replay needs the first pose; load the trajectory with its pose sidecar")
        start = Pose.from_array(traj.poses[0])
    pose = start
    sensors = np.empty_like(traj.sensors)
    poses = np.empty((len(traj), 3))
    clamps = 0
    for t in range(len(traj)):
        sensors[t] = sense(traj.env, pose)
        poses[t] = (pose.x, pose.y, pose.theta)
        pose, clamped = step_agent(traj.env, pose, MotorCommand(*map(float, traj.motors[t])))
        clamps += clamped
    return Trajectory(
        env=traj.env, seed=traj.seed, sensors=sensors, motors=traj.motors.copy(), poses=poses, clamp_count=clamps
    )
