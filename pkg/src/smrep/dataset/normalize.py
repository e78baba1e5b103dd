"""Model-input scaling: sensors / range into [0, 1], d unchanged, r / pi into (-1, 1]."""
from __future__ import annotations

import math

import numpy as np

from smrep.sim.agent import SENSOR_RANGE
from smrep.utils.exceptions import DatasetError


def normalize(sensors: np.ndarray, motors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sensors = np.asarray(sensors, dtype=float)
    motors = np.asarray(motors, dtype=float)
    if not np.all(np.isfinite(sensors)) or sensors.min(initial=0.0) < 0.0 or sensors.max(initial=0.0) > SENSOR_RANGE:
        raise DatasetError(f"sensor values must lie in [0, {SENSOR_RANGE}]")
    scaled_motors = motors.copy()
    scaled_motors[..., 1] = motors[..., 1] / math.pi
    return sensors / SENSOR_RANGE, scaled_motors


def denormalize(sensors: np.ndarray, motors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    restored = np.asarray(motors, dtype=float).copy()
    restored[..., 1] = restored[..., 1] * math.pi
    return np.asarray(sensors, dtype=float) * SENSOR_RANGE, restored
