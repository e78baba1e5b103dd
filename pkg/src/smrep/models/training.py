"""
smrep/models/training.py
────────────────────────
Mini-batch Adam training with validation-based early stopping.

Memoryless kinds train on shuffled single transitions.  Recurrent kinds train on
contiguous windows of ``horizon`` steps, each started from a zero state.  An epoch
pools ``tilings_per_epoch`` non-overlapping tilings of the split, each at a distinct
random phase, and shuffles them at window granularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import pandas as pd

from smrep.dataset.normalize import normalize
from smrep.dataset.trajectory import DatasetSplits, Trajectory, split
from smrep.models.base import SensorimotorNetwork
from smrep.models.contracts import ArchitectureSpec, TrainingConfig
from smrep.models.evaluation import scoring_windows, window_loss
from smrep.models.registry import registry
from smrep.nn.optim import AdamState, adam_step
from smrep.nn.parameters import Parameters, parameter_norms
from smrep.utils.exceptions import TrainingError
from smrep.utils.logger import setup_logger

HISTORY_COLUMNS = ["epoch", "train_loss", "val_loss"]


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass
class EarlyStopping:
    """
    Validation-based stopping with a progress anchor.

    ``reference`` is the loss of the last epoch that counted as progress: an epoch
    progresses only if it beats the reference by ``min_relative_improvement``, and
    only then does the reference move.  ``patience`` epochs in a row without
    progress stop training.  ``best`` is tracked separately for checkpointing;
    ties for the best go to the earliest epoch.
    """

    patience: int = 10
    min_relative_improvement: float = 0.05
    reference: float = math.inf
    best: float = math.inf
    best_epoch: int = 0
    stale: int = 0

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record one epoch; True when it is the new best."""
        if val_loss < (1.0 - self.min_relative_improvement) * self.reference:
            self.reference = val_loss
            self.stale = 0
        else:
            self.stale += 1
        is_best = val_loss < self.best
        if is_best:
            self.best, self.best_epoch = val_loss, epoch
        return is_best

    @property
    def should_stop(self) -> bool:
        return self.stale >= self.patience


@dataclass
class TrainedModel:
    network: SensorimotorNetwork
    history: list[EpochRecord]
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def spec(self) -> ArchitectureSpec:
        return self.network.spec

    @property
    def best_epoch(self) -> int:
        return int(self.provenance.get("best_epoch", 0))

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.epoch, r.train_loss, r.val_loss) for r in self.history], columns=HISTORY_COLUMNS
        )


def epoch_starts(
    network: SensorimotorNetwork, length: int, rng: np.random.Generator, tilings: int = 1
) -> np.ndarray:
    """
    Shuffled start steps of one epoch's training windows over a split of ``length``
    steps.  Memoryless kinds start a 2-step window at every transition.  Recurrent
    kinds pool ``tilings`` non-overlapping tilings of ``horizon``-step windows, each
    at a distinct random phase.
    """
    if not network.recurrent:
        return rng.permutation(max(length - 1, 0))
    horizon = network.spec.horizon
    last = length - horizon
    if last < 0:
        return np.empty(0, dtype=np.int64)
    phases = rng.permutation(min(horizon, last + 1))[:tilings]
    return rng.permutation(np.concatenate([np.arange(p, last + 1, horizon) for p in phases]))


def gather_windows(values: np.ndarray, starts: np.ndarray, window: int) -> np.ndarray:
    """(T, F) rows → (window, len(starts), F) block of the windows beginning at ``starts``."""
    return values[starts[None, :] + np.arange(window)[:, None]]


class Trainer:
    """
    Usage:
        trained = Trainer(config).fit(spec, trajectory, init_seed=1, shuffle_seed=2)
    """

    def __init__(self, config: Optional[TrainingConfig] = None) -> None:
        self.config = config or TrainingConfig()
        self.logger = setup_logger(f"{__name__}.Trainer")

    def fit(
        self,
        spec: ArchitectureSpec,
        trajectory: Trajectory,
        *,
        init_seed: int = 0,
        shuffle_seed: int = 0,
        splits: Optional[DatasetSplits] = None,
        dataset_id: str = "",
    ) -> TrainedModel:
        cfg = self.config
        splits = splits or split(trajectory)
        if spec.horizon != cfg.horizon:
            spec = spec.model_copy(update={"horizon": cfg.horizon})
        network = registry.create(spec, seed=init_seed)
        dtype = network.params["predictor.out.W"].dtype

        sensors, motors = normalize(trajectory.sensors, trajectory.motors)
        sensors, motors = sensors.astype(dtype, copy=False), motors.astype(dtype, copy=False)
        train_sensors, train_motors = sensors[splits.train], motors[splits.train]
        window = spec.horizon if network.recurrent else 2
        tilings = min(cfg.tilings_per_epoch, spec.horizon) if network.recurrent else 1
        val_s, val_m = scoring_windows(network.window_length, sensors[splits.validation], motors[splits.validation])
        available = max(len(train_sensors) - window + 1, 0)
        if available == 0 or val_s.shape[1] == 0 or val_s.shape[0] < 2:
            raise TrainingError(
                f"empty splits: {available} training windows, {val_s.shape[1]} validation windows "
                f"from a trajectory of {len(trajectory)} steps"
            )

        self.logger.info(
            f"training {network.architecture_id}: windows of {window} steps, {tilings} tiling(s) per epoch, "
            f"batch {cfg.batch_size}, lr {cfg.learning_rate}"
        )
        optimizer = AdamState(lr=cfg.learning_rate)
        rng = np.random.default_rng(shuffle_seed)
        stopper = EarlyStopping(cfg.patience, cfg.min_relative_improvement)
        best_params = _snapshot(network.params)
        history: list[EpochRecord] = []

        for epoch in range(1, cfg.max_epochs + 1):
            starts = epoch_starts(network, len(train_sensors), rng, tilings)
            n = len(starts)
            total = 0.0
            for batch, first in enumerate(range(0, n, cfg.batch_size)):
                idx = starts[first:first + cfg.batch_size]
                loss, grads = network.loss_and_grads(
                    gather_windows(train_sensors, idx, window), gather_windows(train_motors, idx, window)
                )
                if not math.isfinite(loss):
                    raise TrainingError(
                        f"non-finite training loss {loss} at epoch {epoch}, batch {batch}; "
                        f"parameter norms {parameter_norms(network.params)}"
                    )
                adam_step(network.params, grads, optimizer)
                total += loss * len(idx)
            train_loss = total / n
            val_loss = window_loss(network, val_s, val_m)
            if not math.isfinite(val_loss):
                raise TrainingError(
                    f"non-finite validation loss at epoch {epoch}; parameter norms {parameter_norms(network.params)}"
                )

            history.append(EpochRecord(epoch, train_loss, val_loss))
            if stopper.update(epoch, val_loss):
                best_params = _snapshot(network.params)
            self.logger.debug(f"epoch {epoch}: train {train_loss:.6f}, val {val_loss:.6f}")
            if epoch % 10 == 0:
                self.logger.info(f"epoch {epoch}: train {train_loss:.6f}, val {val_loss:.6f}, best {stopper.best:.6f}")
            if stopper.should_stop:
                self.logger.info(
                    f"early stop after epoch {epoch}: no {cfg.min_relative_improvement:.0%} improvement "
                    f"for {cfg.patience} epochs, best epoch {stopper.best_epoch}"
                )
                break

        for name, value in best_params.items():
            network.params[name][...] = value

        return TrainedModel(
            network=network,
            history=history,
            provenance={
                "dataset_id": dataset_id,
                "env_name": trajectory.env_name,
                "init_seed": init_seed,
                "shuffle_seed": shuffle_seed,
                "epochs_run": len(history),
                "best_epoch": stopper.best_epoch,
                "best_val_loss": stopper.best,
                "training": cfg.model_dump(mode="json"),
            },
        )


def train(
    spec: ArchitectureSpec,
    trajectory: Trajectory,
    config: Optional[TrainingConfig] = None,
    *,
    init_seed: int = 0,
    shuffle_seed: int = 0,
    splits: Optional[DatasetSplits] = None,
    dataset_id: str = "",
) -> TrainedModel:
    return Trainer(config).fit(
        spec, trajectory, init_seed=init_seed, shuffle_seed=shuffle_seed, splits=splits, dataset_id=dataset_id
    )


def _snapshot(params: Parameters) -> Parameters:
    return {name: value.copy() for name, value in params.items()}
