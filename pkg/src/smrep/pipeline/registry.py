"""
smrep/pipeline/registry.py
──────────────────────────
StageRegistry maps StageType → BaseStage subclass.

To add a completely new stage:
  1. Add a value to smrep/contracts.py  StageType enum
  2. Create a class in pipeline/builtin.py (or a new file)
  3. Call  registry.register(StageType.YOUR_TYPE, YourStageClass)  below
"""
from __future__ import annotations

from typing import Type

from smrep.contracts import StageConfig, StageType
from smrep.pipeline.base import BaseStage
from smrep.pipeline.builtin import (
    ClusterStage,
    EvaluateStage,
    GenerateStage,
    ManifestStage,
    RepresentStage,
    TrainStage,
    TransferStage,
)


class StageRegistry:
    """Singleton registry; import the module-level `registry` instance."""

    def __init__(self) -> None:
        self._map: dict[StageType, Type[BaseStage]] = {}

    def register(self, stage_type: StageType, cls: Type[BaseStage]) -> None:
        self._map[stage_type] = cls

    def create(self, config: StageConfig) -> BaseStage:
        """
        Instantiate a stage from its config.
        Raises KeyError if stage_type is not registered.
        """
        cls = self._map.get(config.stage_type)
        if cls is None:
            raise KeyError(
                f"No stage registered for type '{config.stage_type}'. "
                f"Registered types: {self.registered_types()}"
            )
        return cls(config)

    def registered_types(self) -> list[str]:
        return [t.value for t in self._map]


# ── Module-level singleton ─────────────────────────────────────────────────

registry = StageRegistry()

registry.register(StageType.GENERATE,  GenerateStage)
registry.register(StageType.TRAIN,     TrainStage)
registry.register(StageType.EVALUATE,  EvaluateStage)
registry.register(StageType.REPRESENT, RepresentStage)
registry.register(StageType.CLUSTER,   ClusterStage)
registry.register(StageType.TRANSFER,  TransferStage)
registry.register(StageType.MANIFEST,  ManifestStage)
