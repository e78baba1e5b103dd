"""Trajectory generation, splitting, persistence and model-input scaling."""

from smrep.dataset.normalize import denormalize, normalize
from smrep.dataset.storage import export_csv, load_trajectory, save_trajectory
from smrep.dataset.trajectory import (
    DatasetSplits,
    SensorimotorRecord,
    Trajectory,
    generate,
    replay,
    split,
)

__all__ = [
    "DatasetSplits",
    "SensorimotorRecord",
    "Trajectory",
    "denormalize",
    "export_csv",
    "generate",
    "load_trajectory",
    "normalize",
    "replay",
    "save_trajectory",
    "split",
]
