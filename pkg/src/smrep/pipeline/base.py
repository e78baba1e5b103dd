"""
smrep/pipeline/base.py
──────────────────────
Abstract base for every pipeline stage, plus the context stages share.

To add a new stage:
  1. Create a subclass of BaseStage
  2. Implement `_run`, yielding progress payloads and recording outputs
  3. Register it in pipeline/registry.py
"""
from __future__ import annotations

import hashlib
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from smrep.contracts import (
    PipelineEvent,
    PipelineEventType,
    RunConfig,
    StageConfig,
    StageResult,
    environment_key,
)
from smrep.models.contracts import ArchitectureKind
from smrep.utils.logger import setup_logger


@dataclass
class RunContext:
    """Everything a stage may read from or add to.  Paths are absolute."""

    config: RunConfig
    run_dir: Path
    datasets: dict[str, Path] = field(default_factory=dict)                          # env key → .smt
    models: dict[tuple[ArchitectureKind, int], Path] = field(default_factory=dict)   # (kind, replicate) → dir
    representations: dict[tuple[str, int, str], Path] = field(default_factory=dict)  # (architecture, replicate, env) → .reps
    clusters: dict[tuple[str, int], Path] = field(default_factory=dict)              # (architecture, replicate) → .bin
    outputs: list[Path] = field(default_factory=list)
    summaries: dict[str, dict[str, Any]] = field(default_factory=dict)

    @property
    def env_keys(self) -> list[str]:
        return [environment_key(e) for e in self.config.environments]

    @property
    def train_key(self) -> str:
        return environment_key(self.config.train_environment)

    def path(self, *parts: str) -> Path:
        target = self.run_dir.joinpath(*parts)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def record(self, *paths: Path) -> None:
        self.outputs.extend(Path(p) for p in paths)

    def relative(self, path: Path) -> str:
        return Path(path).relative_to(self.run_dir).as_posix()


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class BaseStage(ABC):
    """
    Every pipeline stage follows this contract.

    The PipelineEngine calls:
        for event in stage.execute(context, seq):
            yield event
    """

    def __init__(self, config: StageConfig) -> None:
        self.config = config
        self.stage_id = config.stage_id
        self.logger = setup_logger(f"{__name__}.{type(self).__name__}")
        self._outputs: list[Path] = []
        self._summary: dict[str, Any] = {}

    # ── Subclasses must provide ────────────────────────────────────────────

    @abstractmethod
    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        """Do the work; yield one payload per progress step."""

    # ── Public execution entry point ───────────────────────────────────────

    def execute(self, context: RunContext, seq: int = 0) -> Iterator[PipelineEvent]:
        """
        Run this stage.  Yields PipelineEvents:
          STAGE_STARTED → STAGE_PROGRESS (×N) → STAGE_COMPLETED
        Exceptions propagate to the engine, which turns them into PIPELINE_ERROR.
        """
        t0 = time.monotonic()
        run_name = context.config.name
        yield self._event(PipelineEventType.STAGE_STARTED, run_name, seq, {"stage_type": self.config.stage_type})
        seq += 1

        for payload in self._run(context):
            yield self._event(PipelineEventType.STAGE_PROGRESS, run_name, seq, payload)
            seq += 1

        context.record(*self._outputs)
        context.summaries[self.stage_id] = self._summary
        result = StageResult(
            stage_id=self.stage_id,
            stage_type=self.config.stage_type,
            outputs=[context.relative(p) for p in self._outputs],
            summary=self._summary,
            duration_ms=(time.monotonic() - t0) * 1000,
        )
        yield self._event(PipelineEventType.STAGE_COMPLETED, run_name, seq, {"result": result.model_dump(mode="json")})

    # ── Helpers ────────────────────────────────────────────────────────────

    def _emit(self, *paths: Path) -> None:
        self._outputs.extend(paths)

    def _event(self, event_type: PipelineEventType, run_name: str, seq: int, payload: dict) -> PipelineEvent:
        return PipelineEvent(
            event_type=event_type,
            run_name=run_name,
            stage_id=self.stage_id,
            sequence=seq,
            payload=payload,
        )
