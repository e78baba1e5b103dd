"""Adam with bias correction, updating named parameter arrays in place."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from smrep.utils.exceptions import ShapeError


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: dict[str, np.ndarray], grads: dict[str, np.ndarray], state: AdamState
) -> tuple[dict[str, np.ndarray], AdamState]:
    """
    One Adam update.  ``params`` arrays are modified in place (layers hold views on
    them) and returned together with the advanced state.
    """
    missing = set(params) ^ set(grads)
    if missing:
        raise ShapeError(f"parameters and gradients disagree on names: {sorted(missing)}")
    for name, value in params.items():
        if grads[name].shape != value.shape:
            raise ShapeError(f"gradient for '{name}' has shape {grads[name].shape}, expected {value.shape}")

    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for name, value in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(value)
            state.v[name] = np.zeros_like(value)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        value -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params, state
