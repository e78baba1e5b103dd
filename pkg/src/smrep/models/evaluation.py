"""
smrep/models/evaluation.py
──────────────────────────
Scoring protocol and representation extraction.

Memoryless models are scored on every transition of a split.  Recurrent models
are scored on consecutive non-overlapping windows of ``window_length`` steps,
each started from a zero state, with every in-window prediction counted.
"""
from __future__ import annotations

from typing import Optional, Protocol, runtime_checkable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from smrep.analysis.representation import RepresentationSet, min_laser_coloring
from smrep.dataset.normalize import normalize
from smrep.dataset.trajectory import Trajectory, split
from smrep.models.base import SensorimotorNetwork
from smrep.utils.exceptions import AnalysisError, DatasetError

EVAL_CHUNK = 4096  # windows per forward pass
ENCODE_CHUNK = 65_536  # steps per forward pass


@runtime_checkable
class SequencePredictor(Protocol):
    """Anything that predicts sensors[1:] of a (W, B, ·) block of windows."""

    @property
    def window_length(self) -> Optional[int]: ...

    def predict(self, sensors: np.ndarray, motors: np.ndarray) -> np.ndarray: ...


def cut_windows(values: np.ndarray, window: int, stride: int) -> np.ndarray:
    """(T, F) → (window, n, F) view of windows starting every ``stride`` steps."""
    if len(values) < window:
        return np.empty((window, 0, values.shape[1]), values.dtype)
    view = sliding_window_view(values, window, axis=0)[::stride]  # (n, F, window)
    return np.ascontiguousarray(view.transpose(2, 0, 1))


def scoring_windows(
    window_length: Optional[int], sensors: np.ndarray, motors: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Blocks the evaluation protocol scores: transitions, or consecutive full windows."""
    if window_length is None:
        return cut_windows(sensors, 2, 1), cut_windows(motors, 2, 1)
    if len(sensors) < window_length:
        # a split shorter than one window is scored as a single short window
        return sensors[:, None, :], motors[:, None, :]
    return cut_windows(sensors, window_length, window_length), cut_windows(motors, window_length, window_length)


def window_loss(model: SequencePredictor, sensor_windows: np.ndarray, motor_windows: np.ndarray) -> float:
    """Mean squared error over every scored prediction and sensor dimension."""
    n = sensor_windows.shape[1]
    if n == 0 or sensor_windows.shape[0] < 2:
        raise DatasetError("nothing to score: fewer than two steps")
    total = 0.0
    for start in range(0, n, EVAL_CHUNK):
        s = sensor_windows[:, start:start + EVAL_CHUNK]
        m = motor_windows[:, start:start + EVAL_CHUNK]
        diff = model.predict(s, m) - s[1:]
        total += float(np.sum(diff * diff))
    return total / ((sensor_windows.shape[0] - 1) * n * sensor_windows.shape[2])


def prediction_error(model: SequencePredictor, sensors: np.ndarray, motors: np.ndarray) -> float:
    """Score normalized (T, 5) sensors and (T, 2) motors."""
    return window_loss(model, *scoring_windows(model.window_length, sensors, motors))


def evaluate(model: SequencePredictor, trajectory: Trajectory, steps: Optional[range] = None) -> float:
    """Mean squared prediction error in normalized sensor units over ``steps`` (default: the test split)."""
    steps = split(trajectory).test if steps is None else steps
    sensors, motors = normalize(trajectory.sensors[steps], trajectory.motors[steps])
    dtype = _model_dtype(model)
    return prediction_error(model, sensors.astype(dtype, copy=False), motors.astype(dtype, copy=False))


def encode_codes(model: SensorimotorNetwork, sensors: np.ndarray) -> np.ndarray:
    """z_s for every row of normalized (T, 5) sensors; recurrent models restart from zero every window."""
    T = len(sensors)
    window = model.window_length
    if window is None:
        parts = [model.encode_sensory(sensors[i:i + ENCODE_CHUNK, None, :])[0][:, 0, :] for i in range(0, T, ENCODE_CHUNK)]
        return np.concatenate(parts, axis=0) if parts else np.empty((0, model.spec.sensory_dims))

    full = (T // window) * window
    windows = cut_windows(sensors[:full], window, window)
    parts = []
    per_chunk = max(1, ENCODE_CHUNK // window)
    for start in range(0, windows.shape[1], per_chunk):
        codes, _ = model.encode_sensory(windows[:, start:start + per_chunk])
        parts.append(codes.transpose(1, 0, 2).reshape(-1, codes.shape[2]))
    if full < T:
        tail, _ = model.encode_sensory(sensors[full:, None, :])
        parts.append(tail[:, 0, :])
    return np.concatenate(parts, axis=0) if parts else np.empty((0, model.spec.sensory_dims))


def encode(model: SensorimotorNetwork, trajectory: Trajectory, model_id: str = "") -> RepresentationSet:
    """Sensory codes of every step paired with ground-truth poses and min-laser values."""
    if trajectory.poses is None:
        raise AnalysisError("encoding needs ground-truth poses; load the trajectory with its pose sidecar")
    sensors, _ = normalize(trajectory.sensors, trajectory.motors)
    codes = encode_codes(model, sensors.astype(_model_dtype(model), copy=False))
    return RepresentationSet(
        codes=codes.astype(np.float64, copy=False),
        poses=trajectory.poses,
        min_laser=min_laser_coloring(trajectory),
        env_name=trajectory.env_name,
        model_id=model_id or model.architecture_id,
        architecture=model.architecture_id,
    )


def _model_dtype(model: SequencePredictor):
    params = getattr(model, "params", None)
    return next(iter(params.values())).dtype if params else np.float64
