"""
smrep/models/contracts.py
─────────────────────────
Architecture descriptions and the per-step outputs of a network.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, Field


class ArchitectureKind(str, Enum):
    """
    Registry of known architectures.
    Add a value here + register the class in models/registry.py.
    """
    S            = "s"             # sensory encoder, memoryless, no motor input
    SM           = "sm"            # sensorimotor encoder, memoryless
    RECURRENT_S  = "recurrent-s"   # sensory encoder with LSTM memory
    RECURRENT_SM = "recurrent-sm"  # sensorimotor encoder with LSTM memory

    @property
    def recurrent(self) -> bool:
        return self in (ArchitectureKind.RECURRENT_S, ArchitectureKind.RECURRENT_SM)

    @property
    def uses_motor(self) -> bool:
        return self in (ArchitectureKind.SM, ArchitectureKind.RECURRENT_SM)


class ArchitectureSpec(BaseModel):
    """Layer plan of one architecture.  Use ``ArchitectureSpec.for_kind`` for the canonical sizes."""
    kind: ArchitectureKind
    sensor_inputs: int = 5
    motor_inputs: int = 2
    sensory_dims: int = Field(10, gt=0)
    motor_dims: int = Field(5, gt=0)
    encoder_hidden: tuple[int, ...] = (16, 32, 64)
    lstm_layers: int = 0
    lstm_units: int = 32
    predictor_hidden: int = 128
    horizon: int = Field(20, ge=2)

    @classmethod
    def for_kind(cls, kind: ArchitectureKind | str) -> "ArchitectureSpec":
        kind = ArchitectureKind(kind)
        if kind.recurrent:
            return cls(kind=kind, encoder_hidden=(16,), lstm_layers=3, lstm_units=32)
        return cls(kind=kind)

    @property
    def recurrent(self) -> bool:
        return self.kind.recurrent

    @property
    def uses_motor(self) -> bool:
        return self.kind.uses_motor

    @property
    def code_dims(self) -> int:
        """Width of the vector the predictor reads (z_s, or z_s ++ z_m)."""
        return self.sensory_dims + (self.motor_dims if self.uses_motor else 0)


@dataclass(frozen=True)
class EncodedStep:
    z_s: np.ndarray
    z_m: Optional[np.ndarray]
    s_hat_next: np.ndarray

    @property
    def z_sm(self) -> np.ndarray:
        return self.z_s if self.z_m is None else np.concatenate([self.z_s, self.z_m])


@dataclass
class EncodedSequence:
    """Network outputs for a (T, B) block of input steps."""

    z_s: np.ndarray              # (T, B, sensory_dims)
    z_m: Optional[np.ndarray]    # (T, B, motor_dims), None for motorless kinds
    s_hat: np.ndarray            # (T, B, sensor_inputs), prediction of the following reading

    @property
    def z_sm(self) -> np.ndarray:
        return self.z_s if self.z_m is None else np.concatenate([self.z_s, self.z_m], axis=-1)

    def steps(self, batch: int = 0) -> Iterator[EncodedStep]:
        for t in range(self.z_s.shape[0]):
            yield EncodedStep(
                z_s=self.z_s[t, batch],
                z_m=None if self.z_m is None else self.z_m[t, batch],
                s_hat_next=self.s_hat[t, batch],
            )


class TrainingConfig(BaseModel):
    batch_size: int = Field(64, gt=0)
    learning_rate: float = Field(0.001, ge=0.0)
    max_epochs: int = Field(500, gt=0)
    patience: int = Field(10, gt=0)
    min_relative_improvement: float = Field(0.05, ge=0.0, lt=1.0)
    horizon: int = Field(20, ge=2)
    tilings_per_epoch: int = Field(20, ge=1, description="phase-shifted window tilings per recurrent epoch, capped at horizon")
