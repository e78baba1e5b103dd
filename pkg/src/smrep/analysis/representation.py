"""Representation sets: codes aligned with ground-truth poses, plus their on-disk form."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from smrep.dataset.normalize import normalize
from smrep.dataset.trajectory import Trajectory
from smrep.nn.checkpoint import read_tensor_file, write_tensor_file
from smrep.utils.exceptions import AnalysisError

RAW_SENSORS = "raw-sensors"

PathLike = Union[str, Path]


@dataclass
class RepresentationSet:
    codes: np.ndarray      # (N, D)
    poses: np.ndarray      # (N, 3) x, y, theta
    min_laser: np.ndarray  # (N,)
    env_name: str
    model_id: str
    architecture: str

    def __post_init__(self) -> None:
        n = len(self.codes)
        if self.codes.ndim != 2 or self.poses.shape != (n, 3) or self.min_laser.shape != (n,):
            raise AnalysisError(
                f"misaligned representation set: codes {self.codes.shape}, poses {self.poses.shape}, "
                f"min_laser {self.min_laser.shape}"
            )
        if not np.all(np.isfinite(self.codes)):
            raise AnalysisError(f"representation set '{self.model_id}' holds non-finite codes")

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def dims(self) -> int:
        return self.codes.shape[1]


def min_laser_coloring(trajectory: Trajectory) -> np.ndarray:
    """Per-step minimum of the five raw sensor readings."""
    return trajectory.sensors.min(axis=1)


def raw_sensor_representation(trajectory: Trajectory) -> RepresentationSet:
    """Baseline: the normalized sensor reading itself as the representation."""
    if trajectory.poses is None:
        raise AnalysisError("a representation set needs ground-truth poses")
    sensors, _ = normalize(trajectory.sensors, trajectory.motors)
    return RepresentationSet(
        codes=sensors,
        poses=trajectory.poses,
        min_laser=min_laser_coloring(trajectory),
        env_name=trajectory.env_name,
        model_id=RAW_SENSORS,
        architecture=RAW_SENSORS,
    )


def save_representations(reps: RepresentationSet, path: PathLike) -> Path:
    return write_tensor_file(
        path,
        {"codes": reps.codes, "poses": reps.poses, "min_laser": reps.min_laser},
        reps.architecture,
        {"env_name": reps.env_name, "model_id": reps.model_id},
    )


def load_representations(path: PathLike) -> RepresentationSet:
    architecture, metadata, tensors = read_tensor_file(path)
    try:
        return RepresentationSet(
            codes=tensors["codes"],
            poses=tensors["poses"],
            min_laser=tensors["min_laser"],
            env_name=str(metadata["env_name"]),
            model_id=str(metadata["model_id"]),
            architecture=architecture,
        )
    except KeyError as exc:
        raise AnalysisError(f"{path}: not a representation file (missing {exc})") from exc
