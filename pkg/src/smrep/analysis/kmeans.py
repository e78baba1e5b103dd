"""
smrep/analysis/kmeans.py
────────────────────────
k-means with k-means++ seeding and Lloyd iterations (Euclidean metric).

Cluster files use the named-tensor container: tensor ``centroids`` plus
k, inertia, iterations, seed and source environment in the header.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from smrep.nn.checkpoint import read_tensor_file, write_tensor_file
from smrep.utils.exceptions import AnalysisError
from smrep.utils.logger import setup_logger

logger = setup_logger(__name__)

MAX_ITER = 300
TOL = 1e-6
_CHUNK = 65_536

PathLike = Union[str, Path]


@dataclass
class ClusterModel:
    centroids: np.ndarray  # (k, D)
    inertia: float
    labels: np.ndarray     # fit-time labels
    n_iter: int = 0
    seed: int = 0
    architecture: str = ""
    env_name: str = ""
    inertia_history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def dims(self) -> int:
        return self.centroids.shape[1]


def squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(N, k) squared Euclidean distances, expanded form, clipped at 0."""
    d2 = (
        np.einsum("ij,ij->i", points, points)[:, None]
        - 2.0 * points @ centroids.T
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
    )
    return np.maximum(d2, 0.0)


def _nearest(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    labels = np.empty(len(points), dtype=np.int64)
    for start in range(0, len(points), _CHUNK):
        labels[start:start + _CHUNK] = np.argmin(squared_distances(points[start:start + _CHUNK], centroids), axis=1)
    return labels


def _point_costs(points: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    diff = points - centroids[labels]
    return np.einsum("ij,ij->i", diff, diff)


def _plus_plus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = squared_distances(points, points[chosen[0]][None, :])[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        d2 = np.minimum(d2, squared_distances(points, points[idx][None, :])[:, 0])
    return points[chosen].copy()


def kmeans_fit(
    codes: np.ndarray,
    k: int = 20,
    seed: int = 0,
    *,
    max_iter: int = MAX_ITER,
    tol: float = TOL,
    architecture: str = "",
    env_name: str = "",
) -> ClusterModel:
    """
    Lloyd iterations until no centroid moves by ``tol`` or ``max_iter`` is reached.
    A cluster that empties is reseeded to the point farthest from its own centroid.
    Raises AnalysisError when N < k or when inertia ever increases.
    """
    points = np.asarray(codes, dtype=np.float64)
    if points.ndim != 2:
        raise AnalysisError(f"codes must be (N, D), got {points.shape}")
    n = len(points)
    if n < k:
        raise AnalysisError(f"k-means needs at least k={k} points, got {n}")

    rng = np.random.default_rng(seed)
    centroids = _plus_plus(points, k, rng)
    labels = _nearest(points, centroids)
    costs = _point_costs(points, centroids, labels)
    inertia = float(costs.sum())
    history = [inertia]
    slack = 1e-9 * (float(np.einsum("ij,ij->", points, points)) + 1.0)

    iterations = 0
    for iterations in range(1, max_iter + 1):
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, points)
        updated = centroids.copy()
        filled = counts > 0
        updated[filled] = sums[filled] / counts[filled, None]
        for j in np.flatnonzero(~filled):
            far = int(np.argmax(costs))
            if costs[far] > 0.0:
                updated[j] = points[far]
                costs[far] = 0.0

        shift = float(np.sqrt(np.max(np.sum((updated - centroids) ** 2, axis=1))))
        centroids = updated
        labels = _nearest(points, centroids)
        costs = _point_costs(points, centroids, labels)
        current = float(costs.sum())
        if current > inertia + slack:
            raise AnalysisError(f"k-means inertia increased at iteration {iterations}: {inertia} -> {current}")
        inertia = current
        history.append(inertia)
        if shift < tol:
            break

    logger.debug(f"k-means k={k} converged after {iterations} iterations, inertia {inertia:.6g}")
    return ClusterModel(
        centroids=centroids,
        inertia=inertia,
        labels=labels,
        n_iter=iterations,
        seed=seed,
        architecture=architecture,
        env_name=env_name,
        inertia_history=history,
    )


def assign(model: ClusterModel, codes: np.ndarray) -> np.ndarray:
    """Nearest-centroid labels."""
    points = np.asarray(codes, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != model.dims:
        raise AnalysisError(f"codes {points.shape} do not match {model.dims}-dimensional centroids")
    return _nearest(points, model.centroids)


def save_clusters(model: ClusterModel, path: PathLike) -> Path:
    return write_tensor_file(
        path,
        {"centroids": model.centroids},
        model.architecture,
        {
            "k": model.k,
            "inertia": model.inertia,
            "n_iter": model.n_iter,
            "seed": model.seed,
            "env_name": model.env_name,
        },
    )


def load_clusters(path: PathLike) -> ClusterModel:
    architecture, metadata, tensors = read_tensor_file(path)
    if "centroids" not in tensors:
        raise AnalysisError(f"{path}: not a cluster file")
    return ClusterModel(
        centroids=tensors["centroids"],
        inertia=float(metadata.get("inertia", 0.0)),
        labels=np.empty(0, dtype=np.int64),
        n_iter=int(metadata.get("n_iter", 0)),
        seed=int(metadata.get("seed", 0)),
        architecture=architecture,
        env_name=str(metadata.get("env_name", "")),
    )
