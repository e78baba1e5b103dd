"""Dense layers with ReLU / identity activation and exact analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from smrep.utils.exceptions import ShapeError


class Activation(str, Enum):
    RELU = "relu"
    IDENTITY = "identity"


@dataclass
class DenseLayer:
    """y = act(x W^T + b) over the last axis of x.  W is (out, in), b is (out,)."""

    W: np.ndarray
    b: np.ndarray
    activation: Activation = Activation.RELU

    def __post_init__(self) -> None:
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ShapeError(f"dense layer W {self.W.shape} and b {self.b.shape} are inconsistent")

    @property
    def in_features(self) -> int:
        return self.W.shape[1]

    @property
    def out_features(self) -> int:
        return self.W.shape[0]


def _pre_activation(layer: DenseLayer, x: np.ndarray) -> np.ndarray:
    if x.shape[-1] != layer.in_features:
        raise ShapeError(f"dense layer expects {layer.in_features} inputs, got shape {x.shape}")
    return x @ layer.W.T + layer.b


def dense_forward(layer: DenseLayer, x: np.ndarray) -> np.ndarray:
    pre = _pre_activation(layer, x)
    if layer.activation is Activation.RELU:
        return np.maximum(pre, 0.0)
    return pre


def dense_backward(layer: DenseLayer, x: np.ndarray, dy: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (dL/dx, dL/dW, dL/db).  The ReLU derivative at exactly 0 is 0."""
    pre = _pre_activation(layer, x)
    if dy.shape != pre.shape:
        raise ShapeError(f"upstream gradient {dy.shape} does not match layer output {pre.shape}")
    dpre = dy * (pre > 0.0) if layer.activation is Activation.RELU else dy
    flat_dpre = dpre.reshape(-1, layer.out_features)
    flat_x = x.reshape(-1, layer.in_features)
    return dpre @ layer.W, flat_dpre.T @ flat_x, flat_dpre.sum(axis=0)


def relu_pattern(layer: DenseLayer, x: np.ndarray) -> np.ndarray:
    """Which units are active for input x (used to detect ReLU kinks in gradient checks)."""
    return _pre_activation(layer, x) > 0.0
