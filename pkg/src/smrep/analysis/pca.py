"""Principal component projection of representation codes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smrep.utils.exceptions import AnalysisError


@dataclass
class PcaModel:
    mean: np.ndarray                # (D,)
    components: np.ndarray          # (n, D), orthonormal rows, descending variance
    explained_variance: np.ndarray  # (n,)
    total_variance: float

    @property
    def explained_ratio(self) -> np.ndarray:
        return self.explained_variance / self.total_variance


def pca_fit(codes: np.ndarray, n_components: int = 2) -> PcaModel:
    """
    Top eigenvectors of the sample covariance (ddof 1).  Each component is signed so
    that its largest-magnitude entry is positive, which makes projections reproducible.
    """
    codes = np.asarray(codes, dtype=np.float64)
    if codes.ndim != 2:
        raise AnalysisError(f"codes must be (N, D), got {codes.shape}")
    n, d = codes.shape
    if n <= d:
        raise AnalysisError(f"PCA needs more points than dimensions, got {n} points in {d} dimensions")
    if n_components > d:
        raise AnalysisError(f"cannot extract {n_components} components from {d} dimensions")

    mean = codes.mean(axis=0)
    cov = np.cov(codes - mean, rowvar=False, ddof=1)
    total = float(np.trace(cov))
    if not total > 0.0:
        raise AnalysisError("degenerate input: all points are identical")

    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:n_components]
    components = eigenvectors[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0.0:
            row *= -1.0
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=np.clip(eigenvalues[order], 0.0, None),
        total_variance=total,
    )


def pca_project(model: PcaModel, codes: np.ndarray) -> np.ndarray:
    return (np.asarray(codes, dtype=np.float64) - model.mean) @ model.components.T
