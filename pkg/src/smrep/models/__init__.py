"""The four prediction architectures, their training loop and the scoring protocol."""

from smrep.models.base import SensorimotorNetwork
from smrep.models.builtin import (
    RecurrentSensorimotorEncoder,
    RecurrentSensoryEncoder,
    SensorimotorEncoder,
    SensoryEncoder,
)
from smrep.models.contracts import ArchitectureKind, ArchitectureSpec, EncodedSequence, EncodedStep
from smrep.models.evaluation import SequencePredictor, encode, evaluate
from smrep.models.registry import registry
from smrep.models.storage import load_model, load_network, save_model
from smrep.models.training import EarlyStopping, TrainedModel, Trainer, train

__all__ = [
    "ArchitectureKind",
    "ArchitectureSpec",
    "EarlyStopping",
    "EncodedSequence",
    "EncodedStep",
    "RecurrentSensorimotorEncoder",
    "RecurrentSensoryEncoder",
    "SensorimotorEncoder",
    "SensorimotorNetwork",
    "SensoryEncoder",
    "SequencePredictor",
    "TrainedModel",
    "Trainer",
    "encode",
    "evaluate",
    "load_model",
    "load_network",
    "registry",
    "save_model",
    "train",
]
