"""Named parameter tensors and their initialization."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from smrep.utils.exceptions import SmrepError

Parameters = dict[str, np.ndarray]


class InitKind(str, Enum):
    WEIGHT = "weight"
    BIAS = "bias"
    LSTM_BIAS = "lstm_bias"  # zero except the forget-gate slice, which starts at 1


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    shape: tuple[int, ...]
    kind: InitKind = InitKind.WEIGHT
    fan_in: int = 0
    fan_out: int = 0


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_parameters(plan: list[ParameterSpec], seed: int, dtype: str = "float64") -> Parameters:
    """
    Weights ~ U(-sqrt(6 / (fan_in + fan_out)), +sqrt(...)), biases 0, LSTM forget bias 1.
    Deterministic in (plan, seed); draws happen in plan order.
    """
    rng = np.random.default_rng(seed)
    params: Parameters = {}
    for spec in plan:
        if spec.kind is InitKind.WEIGHT:
            bound = glorot_bound(spec.fan_in, spec.fan_out)
            params[spec.name] = rng.uniform(-bound, bound, size=spec.shape).astype(dtype)
        else:
            value = np.zeros(spec.shape, dtype=dtype)
            if spec.kind is InitKind.LSTM_BIAS:
                hidden = spec.shape[0] // 4
                value[hidden:2 * hidden] = 1.0
            params[spec.name] = value
    return params


def check_finite(params: Parameters) -> None:
    """Raise if any tensor holds NaN or Inf (debug hook for training loops)."""
    bad = [name for name, value in params.items() if not np.all(np.isfinite(value))]
    if bad:
        raise SmrepError(f"non-finite values in parameters: {bad}")


def parameter_norms(params: Parameters) -> dict[str, float]:
    return {name: float(np.linalg.norm(value)) for name, value in params.items()}
