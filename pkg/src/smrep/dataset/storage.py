"""
smrep/dataset/storage.py
────────────────────────
Versioned binary trajectory files plus CSV exports.

Layout of ``<name>.smt`` (all little-endian):

    8s   magic  b"SMTRAJ\\0\\0"
    u32  format version
    u32  header length in bytes
    ...  header, canonical JSON: env, env_name, seed, steps, clamp_count
    f8   steps x 7 values: s0..s4, d, r

Ground-truth poses live in a sidecar ``<name>.smt.pose`` (magic b"SMPOSE\\0\\0",
version, u64 steps, then steps x 3 values x, y, theta) so that model-facing loaders
never touch them.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from smrep.dataset.trajectory import Trajectory
from smrep.sim.environment import Environment
from smrep.utils.exceptions import TrajectoryFormatError

TRAJ_MAGIC = b"SMTRAJ\x00\x00"
POSE_MAGIC = b"SMPOSE\x00\x00"
FORMAT_VERSION = 1

_PREFIX = struct.Struct("<8sII")
_POSE_PREFIX = struct.Struct("<8sIQ")
_F8 = np.dtype("<f8")

SENSOR_COLUMNS = ["s0", "s1", "s2", "s3", "s4"]
MOTOR_COLUMNS = ["d", "r"]
POSE_COLUMNS = ["x", "y", "theta"]

PathLike = Union[str, Path]


def pose_sidecar(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".pose")


def save_trajectory(traj: Trajectory, path: PathLike) -> Path:
    """Write ``traj`` to ``path`` (and its poses, when present, to the sidecar)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps(
        {
            "env": traj.env.model_dump(mode="json"),
            "env_name": traj.env_name,
            "seed": traj.seed,
            "steps": len(traj),
            "clamp_count": traj.clamp_count,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    payload = np.hstack([traj.sensors, traj.motors]).astype(_F8, copy=False)
    with path.open("wb") as fh:
        fh.write(_PREFIX.pack(TRAJ_MAGIC, FORMAT_VERSION, len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(payload).tobytes())

    if traj.poses is not None:
        with pose_sidecar(path).open("wb") as fh:
            fh.write(_POSE_PREFIX.pack(POSE_MAGIC, FORMAT_VERSION, len(traj)))
            fh.write(np.ascontiguousarray(traj.poses.astype(_F8, copy=False)).tobytes())
    return path


def _check_prefix(path: Path, magic: bytes, expected: bytes, version: int) -> None:
    if magic != expected:
        raise TrajectoryFormatError(f"{path}: bad magic header {magic!r}, not a smrep file")
    if version != FORMAT_VERSION:
        raise TrajectoryFormatError(
            f"{path}: format version {version} is not supported (expected {FORMAT_VERSION})"
        )


def load_trajectory(path: PathLike, include_poses: bool = True) -> Trajectory:
    """
    Read a trajectory.  With ``include_poses=False`` the pose sidecar is not opened,
    which is how every model-facing caller loads data.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"trajectory file not found: {path}")
    raw = path.read_bytes()
    if len(raw) < _PREFIX.size:
        raise TrajectoryFormatError(f"{path}: file too short for a trajectory header")
    magic, version, header_len = _PREFIX.unpack_from(raw)
    _check_prefix(path, magic, TRAJ_MAGIC, version)

    try:
        header = json.loads(raw[_PREFIX.size:_PREFIX.size + header_len].decode("utf-8"))
        steps = int(header["steps"])
        env = Environment.model_validate(header["env"])
    except (ValueError, KeyError, UnicodeDecodeError) as exc:
        raise TrajectoryFormatError(f"{path}: malformed header ({exc})") from exc

    body = raw[_PREFIX.size + header_len:]
    if len(body) != steps * 7 * _F8.itemsize:
        raise TrajectoryFormatError(f"{path}: payload holds {len(body)} bytes, expected {steps} x 7 doubles")
    data = np.frombuffer(body, dtype=_F8).reshape(steps, 7).astype(np.float64)

    poses: Optional[np.ndarray] = None
    if include_poses and pose_sidecar(path).exists():
        poses = _load_poses(pose_sidecar(path), steps)

    return Trajectory(
        env=env,
        seed=int(header["seed"]),
        sensors=data[:, :5].copy(),
        motors=data[:, 5:].copy(),
        poses=poses,
        clamp_count=int(header.get("clamp_count", 0)),
    )


def _load_poses(path: Path, steps: int) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < _POSE_PREFIX.size:
        raise TrajectoryFormatError(f"{path}: file too short for a pose header")
    magic, version, count = _POSE_PREFIX.unpack_from(raw)
    _check_prefix(path, magic, POSE_MAGIC, version)
    if count != steps:
        raise TrajectoryFormatError(f"{path}: {count} poses for a trajectory of {steps} steps")
    body = raw[_POSE_PREFIX.size:]
    if len(body) != steps * 3 * _F8.itemsize:
        raise TrajectoryFormatError(f"{path}: truncated pose payload")
    return np.frombuffer(body, dtype=_F8).reshape(steps, 3).astype(np.float64)


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """One row per step: t, s0..s4, d, r."""
    frame = pd.DataFrame(np.hstack([traj.sensors, traj.motors]), columns=SENSOR_COLUMNS + MOTOR_COLUMNS)
    frame.insert(0, "t", np.arange(len(traj)))
    return frame


def export_csv(traj: Trajectory, path: PathLike, pose_limit: Optional[int] = None) -> list[Path]:
    """
    Write ``path`` (t, s0..s4, d, r) and, when poses are known, ``<stem>_poses.csv``
    (t, x, y, theta) limited to the first ``pose_limit`` steps.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(traj).to_csv(path, index=False)
    written = [path]
    if traj.poses is not None:
        poses = traj.poses if pose_limit is None else traj.poses[:pose_limit]
        pose_frame = pd.DataFrame(poses, columns=POSE_COLUMNS)
        pose_frame.insert(0, "t", np.arange(len(poses)))
        pose_path = path.with_name(f"{path.stem}_poses.csv")
        pose_frame.to_csv(pose_path, index=False)
        written.append(pose_path)
    return written


def read_csv(path: PathLike) -> pd.DataFrame:
    frame = pd.read_csv(path, float_precision="round_trip")
    expected = ["t"] + SENSOR_COLUMNS + MOTOR_COLUMNS
    if list(frame.columns) != expected:
        raise TrajectoryFormatError(f"{path}: columns {list(frame.columns)} != {expected}")
    return frame
