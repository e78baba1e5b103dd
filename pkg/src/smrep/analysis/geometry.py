"""Geometric readings of clusters: corners, wall ends, and the nothing-perceived records."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from smrep.analysis.representation import RepresentationSet
from smrep.sim.agent import SENSOR_RANGE
from smrep.sim.environment import Environment
from smrep.sim.landmarks import near_landmarks

CORNER_RADIUS = 3.0
WALL_END_RADIUS = 3.0
FACING_TOLERANCE = 0.6
CORNER_CLUSTER_SHARE = 0.5
WALL_END_CLUSTER_SHARE = 0.4
CORNER_TRANSFER_SHARE = 0.6

CLUSTER_GEOMETRY_COLUMNS = ["cluster_id", "size", "corner_share", "wall_end_share", "nothing_perceived"]


def corner_concentration(
    poses: np.ndarray,
    env: Environment,
    radius: float = CORNER_RADIUS,
    facing_tolerance: Optional[float] = FACING_TOLERANCE,
) -> float:
    """Share of poses within ``radius`` of a corner (and facing it, unless tolerance is None)."""
    if len(poses) == 0:
        return 0.0
    return float(np.mean(near_landmarks(poses, env.corners(), radius, facing_tolerance)))


def wall_end_concentration(poses: np.ndarray, env: Environment, radius: float = WALL_END_RADIUS) -> float:
    """Share of poses within ``radius`` of a free interior-wall endpoint."""
    if len(poses) == 0:
        return 0.0
    return float(np.mean(near_landmarks(poses, env.wall_ends(), radius)))


def nothing_perceived(reps: RepresentationSet) -> np.ndarray:
    """Records whose five sensors all read the maximum range."""
    return reps.min_laser >= SENSOR_RANGE


def cluster_geometry(
    labels: np.ndarray,
    reps: RepresentationSet,
    env: Environment,
    k: int,
    radius: float = CORNER_RADIUS,
    facing_tolerance: float = FACING_TOLERANCE,
) -> pd.DataFrame:
    """One row per cluster: size, share of members near a corner / wall end, nothing-perceived count."""
    near_corner = near_landmarks(reps.poses, env.corners(), radius, facing_tolerance)
    near_end = near_landmarks(reps.poses, env.wall_ends(), WALL_END_RADIUS)
    blind = nothing_perceived(reps)
    rows = []
    for c in range(k):
        members = labels == c
        size = int(members.sum())
        rows.append(
            (
                c,
                size,
                float(near_corner[members].mean()) if size else 0.0,
                float(near_end[members].mean()) if size else 0.0,
                int(blind[members].sum()),
            )
        )
    return pd.DataFrame(rows, columns=CLUSTER_GEOMETRY_COLUMNS)


def best_cluster(table: pd.DataFrame, column: str, threshold: float) -> Optional[int]:
    """Cluster with the largest ``column`` share if it reaches ``threshold``."""
    populated = table[table["size"] > 0]
    if populated.empty:
        return None
    row = populated.loc[populated[column].idxmax()]
    return int(row["cluster_id"]) if row[column] >= threshold else None


@dataclass
class NothingPerceivedSpread:
    records: int
    clusters_spanned: int
    dominant_share: float


def nothing_perceived_spread(labels: np.ndarray, reps: RepresentationSet) -> NothingPerceivedSpread:
    """How the all-sensors-at-range records distribute over clusters."""
    blind_labels = labels[nothing_perceived(reps)]
    if len(blind_labels) == 0:
        return NothingPerceivedSpread(0, 0, 0.0)
    counts = np.bincount(blind_labels)
    return NothingPerceivedSpread(
        records=int(len(blind_labels)),
        clusters_spanned=int((counts > 0).sum()),
        dominant_share=float(counts.max() / len(blind_labels)),
    )
