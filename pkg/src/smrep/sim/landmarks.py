"""Pose-to-landmark proximity tests (corners, wall ends)."""
from __future__ import annotations

from typing import Optional

import numpy as np

from smrep.sim.geometry import wrap_angle


def near_landmarks(
    poses: np.ndarray,
    landmarks: np.ndarray,
    radius: float,
    facing_tolerance: Optional[float] = None,
) -> np.ndarray:
    """
    Boolean mask over ``poses`` (N,3): True when some landmark lies within ``radius``
    and, if ``facing_tolerance`` is given, the heading points at that landmark to
    within the tolerance.
    """
    poses = np.atleast_2d(poses)
    if len(landmarks) == 0 or len(poses) == 0:
        return np.zeros(len(poses), dtype=bool)
    delta = landmarks[None, :, :] - poses[:, None, :2]
    dist = np.linalg.norm(delta, axis=-1)
    close = dist <= radius
    if facing_tolerance is not None:
        bearing = np.arctan2(delta[..., 1], delta[..., 0])
        off = np.abs(wrap_angle(bearing - poses[:, None, 2]))
        close &= off <= facing_tolerance
    return close.any(axis=1)
