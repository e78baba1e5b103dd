"""CSV-shaped reports: per-cluster pose samples and 2-D projections."""
from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from smrep.analysis.kmeans import ClusterModel, assign
from smrep.analysis.pca import PcaModel, pca_project
from smrep.analysis.representation import RepresentationSet

CLUSTER_REPORT_COLUMNS = ["cluster_id", "point_id", "x", "y", "theta"]
PROJECTION_COLUMNS = ["point_id", "pc1", "pc2", "min_laser"]
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def cluster_report(
    model: ClusterModel,
    reps: RepresentationSet,
    samples_per_cluster: int = 500,
    seed: int = 0,
    labels: np.ndarray | None = None,
) -> pd.DataFrame:
    """
    Up to ``samples_per_cluster`` uniformly drawn members per cluster (all members of
    smaller clusters), as (cluster_id, point_id, x, y, theta) rows in point order.
    """
    labels = assign(model, reps.codes) if labels is None else labels
    rng = np.random.default_rng(seed)
    picked = []
    for c in range(model.k):
        members = np.flatnonzero(labels == c)
        if len(members) > samples_per_cluster:
            members = np.sort(rng.choice(members, size=samples_per_cluster, replace=False))
        picked.append(members)

    point_ids = np.concatenate(picked) if picked else np.empty(0, dtype=np.int64)
    frame = pd.DataFrame(
        {
            "cluster_id": np.repeat(np.arange(model.k), [len(p) for p in picked]),
            "point_id": point_ids,
            "x": reps.poses[point_ids, 0],
            "y": reps.poses[point_ids, 1],
            "theta": reps.poses[point_ids, 2],
        }
    )
    return frame[CLUSTER_REPORT_COLUMNS]


def projection_frame(model: PcaModel, reps: RepresentationSet) -> pd.DataFrame:
    projected = pca_project(model, reps.codes)
    return pd.DataFrame(
        {
            "point_id": np.arange(len(reps)),
            "pc1": projected[:, 0],
            "pc2": projected[:, 1],
            "min_laser": reps.min_laser,
        }
    )[PROJECTION_COLUMNS]


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    """All report CSVs go through here so floats print identically on every run."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
