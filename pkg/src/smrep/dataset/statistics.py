"""Descriptive statistics of a generated trajectory (coverage, reflex rate, rare events)."""
from __future__ import annotations

import numpy as np

from smrep.dataset.trajectory import Trajectory
from smrep.sim.agent import SENSOR_RANGE, TURN_THRESHOLD
from smrep.sim.geometry import segments_cross
from smrep.sim.landmarks import near_landmarks

CORNER_RADIUS = 3.0
FACING_TOLERANCE = 0.6


def occupancy_grid(traj: Trajectory, bins: int = 10) -> np.ndarray:
    """Visit counts of the agent's positions on a bins x bins grid over the arena."""
    counts, _, _ = np.histogram2d(
        traj.poses[:, 0], traj.poses[:, 1], bins=bins, range=[[0.0, traj.env.size], [0.0, traj.env.size]]
    )
    return counts.astype(int)


def turn_around_fraction(traj: Trajectory) -> float:
    return float(np.mean(traj.sensors.min(axis=1) < TURN_THRESHOLD))


def nothing_perceived_fraction(traj: Trajectory) -> float:
    return float(np.mean(np.all(traj.sensors >= SENSOR_RANGE, axis=1)))


def corner_record_fraction(
    traj: Trajectory, radius: float = CORNER_RADIUS, facing_tolerance: float = FACING_TOLERANCE
) -> float:
    """Share of records within ``radius`` of a corner and facing it."""
    return float(np.mean(near_landmarks(traj.poses, traj.env.corners(), radius, facing_tolerance)))


def penetration_count(traj: Trajectory) -> int:
    """
    Number of steps whose position leaves the open arena or whose path to the next
    recorded position touches a wall.
    """
    xy = traj.poses[:, :2]
    size = traj.env.size
    outside = ~((xy > 0.0) & (xy < size)).all(axis=1)
    crossings = segments_cross(traj.env.segments, xy[:-1], xy[1:])
    return int(outside.sum() + crossings.sum())


def dataset_stats(traj: Trajectory, bins: int = 10) -> dict:
    grid = occupancy_grid(traj, bins)
    return {
        "env_name": traj.env_name,
        "seed": traj.seed,
        "steps": len(traj),
        "clamp_count": traj.clamp_count,
        "occupancy_bins": bins,
        "occupancy_visited": int((grid > 0).sum()),
        "turn_around_fraction": turn_around_fraction(traj),
        "nothing_perceived_fraction": nothing_perceived_fraction(traj),
        "corner_record_fraction": corner_record_fraction(traj),
        "penetrations": penetration_count(traj),
    }
