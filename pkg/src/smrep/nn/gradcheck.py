"""Central finite-difference verification of analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from smrep.nn.parameters import Parameters

Objective = Callable[[], tuple[float, Optional[bytes]]]


@dataclass
class GradCheckReport:
    max_relative_error: float
    checked: int
    kinks_skipped: int
    per_tensor: dict[str, float] = field(default_factory=dict)

    def passed(self, tolerance: float) -> bool:
        return self.max_relative_error < tolerance


def relative_error(analytic: float, numeric: float, floor: float = 1e-6) -> float:
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), floor)


def gradient_check(
    objective: Objective,
    params: Parameters,
    analytic: Parameters,
    *,
    h: float = 1e-5,
    samples_per_tensor: int = 200,
    seed: int = 0,
    floor: float = 1e-6,
) -> GradCheckReport:
    """
    Compare ``analytic`` gradients with central differences of ``objective`` on a random
    subsample of entries per tensor (all entries when the tensor is smaller).

    ``objective()`` reads ``params`` (perturbed in place here) and returns the loss plus
    an optional activation pattern; entries whose +/-h perturbation changes the pattern
    straddle a ReLU kink and are counted in ``kinks_skipped`` instead of being scored.
    """
    rng = np.random.default_rng(seed)
    _, base_pattern = objective()
    per_tensor: dict[str, float] = {}
    checked = kinks = 0

    for name, value in params.items():
        flat = value.reshape(-1)
        count = min(samples_per_tensor, flat.size)
        picks = rng.choice(flat.size, size=count, replace=False)
        worst = 0.0
        for idx in picks:
            original = flat[idx]
            flat[idx] = original + h
            loss_plus, pattern_plus = objective()
            flat[idx] = original - h
            loss_minus, pattern_minus = objective()
            flat[idx] = original
            if base_pattern is not None and (pattern_plus != base_pattern or pattern_minus != base_pattern):
                kinks += 1
                continue
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            worst = max(worst, relative_error(float(analytic[name].reshape(-1)[idx]), numeric, floor))
            checked += 1
        per_tensor[name] = worst

    return GradCheckReport(
        max_relative_error=max(per_tensor.values(), default=0.0),
        checked=checked,
        kinks_skipped=kinks,
        per_tensor=per_tensor,
    )
