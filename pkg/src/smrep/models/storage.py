"""
smrep/models/storage.py
───────────────────────
A trained model on disk is a directory:

    model.ckpt    named-tensor checkpoint (architecture id + spec + provenance in the header)
    history.csv   epoch, train_loss, val_loss
    model.json    spec and provenance, human-readable copy of the checkpoint header
"""
from __future__ import annotations

from pathlib import Path
from typing import Union

import pandas as pd

from smrep.models.base import SensorimotorNetwork
from smrep.models.contracts import ArchitectureSpec
from smrep.models.registry import registry
from smrep.models.training import HISTORY_COLUMNS, EpochRecord, TrainedModel
from smrep.nn.checkpoint import canonical_json, load_checkpoint, save_checkpoint
from smrep.utils.exceptions import CheckpointError

CHECKPOINT_NAME = "model.ckpt"
HISTORY_NAME = "history.csv"
DESCRIPTION_NAME = "model.json"

PathLike = Union[str, Path]


def save_model(trained: TrainedModel, directory: PathLike) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    metadata = {"spec": trained.spec.model_dump(mode="json"), "provenance": trained.provenance}
    ckpt = save_checkpoint(
        directory / CHECKPOINT_NAME, trained.network.params, trained.network.architecture_id, metadata
    )
    history = directory / HISTORY_NAME
    trained.history_frame().to_csv(history, index=False, float_format="%.17g")
    description = directory / DESCRIPTION_NAME
    description.write_bytes(canonical_json(metadata) + b"\n")
    return [ckpt, history, description]


def load_network(path: PathLike) -> SensorimotorNetwork:
    """Rebuild a network from a model directory or a bare checkpoint file."""
    path = Path(path)
    return _read_checkpoint(path / CHECKPOINT_NAME if path.is_dir() else path)[0]


def _read_checkpoint(ckpt: Path) -> tuple[SensorimotorNetwork, dict]:
    architecture, metadata, params = load_checkpoint(ckpt)
    try:
        spec = ArchitectureSpec.model_validate(metadata["spec"])
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"{ckpt}: header carries no valid architecture spec ({exc})") from exc
    if spec.kind.value != architecture:
        raise CheckpointError(f"{ckpt}: header says '{architecture}' but the spec is '{spec.kind.value}'")
    return registry.create(spec, params=params), metadata


def load_model(directory: PathLike) -> TrainedModel:
    directory = Path(directory)
    network, metadata = _read_checkpoint(directory / CHECKPOINT_NAME)
    history: list[EpochRecord] = []
    history_path = directory / HISTORY_NAME
    if history_path.exists():
        frame = pd.read_csv(history_path, float_precision="round_trip")
        if list(frame.columns) != HISTORY_COLUMNS:
            raise CheckpointError(f"{history_path}: columns {list(frame.columns)} != {HISTORY_COLUMNS}")
        history = [EpochRecord(int(r.epoch), float(r.train_loss), float(r.val_loss)) for r in frame.itertuples()]
    return TrainedModel(network=network, history=history, provenance=metadata.get("provenance", {}))
