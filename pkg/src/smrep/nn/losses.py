"""Prediction loss."""
from __future__ import annotations

import numpy as np

from smrep.utils.exceptions import ShapeError


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """
    Mean squared error over every element (steps x batch x sensor dims) and its
    gradient 2 (pred - target) / N with respect to ``predictions``.
    """
    if predictions.shape != targets.shape:
        raise ShapeError(f"predictions {predictions.shape} and targets {targets.shape} differ")
    diff = predictions - targets
    n = diff.size
    return float(np.sum(diff * diff) / n), (2.0 / n) * diff
