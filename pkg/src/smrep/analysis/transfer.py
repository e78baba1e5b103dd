"""Apply an encoder and its clusters, both fit in one environment, to another environment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from smrep.analysis.kmeans import ClusterModel, assign
from smrep.analysis.reports import cluster_report
from smrep.analysis.representation import RepresentationSet
from smrep.dataset.trajectory import Trajectory
from smrep.models.base import SensorimotorNetwork
from smrep.models.evaluation import encode
from smrep.utils.exceptions import AnalysisError
from smrep.utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class TransferReport:
    source_env: str
    target_env: str
    k: int
    representations: RepresentationSet
    labels: np.ndarray
    report: pd.DataFrame

    @property
    def coverage(self) -> float:
        """Share of target points that received a label."""
        if len(self.labels) == 0:
            return 0.0
        return float(np.mean((self.labels >= 0) & (self.labels < self.k)))


def check_compatible(encoder: SensorimotorNetwork, clusters: ClusterModel) -> None:
    if clusters.architecture != encoder.architecture_id:
        raise AnalysisError(
            f"clusters were fit on '{clusters.architecture}' codes but the encoder is '{encoder.architecture_id}'"
        )
    if clusters.dims != encoder.spec.sensory_dims:
        raise AnalysisError(
            f"clusters are {clusters.dims}-dimensional but the encoder emits {encoder.spec.sensory_dims}-d codes"
        )


def transfer(
    encoder: SensorimotorNetwork,
    clusters: ClusterModel,
    trajectory: Trajectory,
    samples_per_cluster: int = 500,
    seed: int = 0,
) -> TransferReport:
    """Encode ``trajectory`` with ``encoder``, label every step by nearest centroid, and report poses per cluster."""
    check_compatible(encoder, clusters)
    reps = encode(encoder, trajectory)
    labels = assign(clusters, reps.codes)
    report = cluster_report(clusters, reps, samples_per_cluster, seed, labels=labels)
    logger.info(
        f"transferred {clusters.k} '{clusters.env_name}' clusters to {trajectory.env_name} "
        f"({len(labels)} points)"
    )
    return TransferReport(
        source_env=clusters.env_name,
        target_env=trajectory.env_name,
        k=clusters.k,
        representations=reps,
        labels=labels,
        report=report,
    )
