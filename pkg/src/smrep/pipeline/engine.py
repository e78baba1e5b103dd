"""
smrep/pipeline/engine.py
────────────────────────
PipelineEngine runs stages in order over one shared RunContext
and yields a unified stream of PipelineEvents.
"""
from __future__ import annotations

import time
from pathlib import Path
from typing import Iterator, Optional

from smrep.contracts import (
    DEFAULT_STAGES,
    PipelineEvent,
    PipelineEventType,
    RunConfig,
    StageConfig,
)
from smrep.pipeline.base import RunContext
from smrep.pipeline.builtin import CONFIG_NAME
from smrep.pipeline.registry import registry
from smrep.utils.logger import setup_logger


def default_stages() -> list[StageConfig]:
    return [StageConfig(stage_id=t.value, stage_type=t) for t in DEFAULT_STAGES]


class PipelineEngine:
    """
    Usage:
        engine = PipelineEngine()
        for event in engine.run(config):
            ...
        engine.error  # the exception that aborted the run, if any
    """

    def __init__(self, stages: Optional[list[StageConfig]] = None) -> None:
        self.stages = stages or default_stages()
        self.error: Optional[BaseException] = None
        self.context: Optional[RunContext] = None
        self.logger = setup_logger(f"{__name__}.PipelineEngine")

    def run(self, config: RunConfig) -> Iterator[PipelineEvent]:
        run_dir = Path(config.output_dir).resolve()
        run_dir.mkdir(parents=True, exist_ok=True)
        context = RunContext(config=config, run_dir=run_dir)
        self.context = context
        config.to_file(run_dir / CONFIG_NAME)  # not hashed: it records output_dir

        t0 = time.monotonic()
        seq = 0
        yield PipelineEvent(
            event_type=PipelineEventType.PIPELINE_STARTED,
            run_name=config.name,
            sequence=seq,
            payload={
                "run_dir": str(run_dir),
                "config_hash": config.config_hash(),
                "stage_ids": [s.stage_id for s in self.stages],
            },
        )
        seq += 1

        completed = 0
        for stage_cfg in self.stages:
            stage = registry.create(stage_cfg)
            try:
                for event in stage.execute(context, seq):
                    seq = event.sequence + 1
                    yield event
            except Exception as exc:
                self.error = exc
                self.logger.error(f"stage '{stage_cfg.stage_id}' failed: {exc}")
                yield PipelineEvent(
                    event_type=PipelineEventType.PIPELINE_ERROR,
                    run_name=config.name,
                    stage_id=stage_cfg.stage_id,
                    sequence=seq,
                    payload={"error": str(exc), "error_type": type(exc).__name__},
                )
                seq += 1
                break
            completed += 1

        yield PipelineEvent(
            event_type=PipelineEventType.PIPELINE_COMPLETED,
            run_name=config.name,
            sequence=seq,
            payload={
                "total_duration_ms": (time.monotonic() - t0) * 1000,
                "stages_completed": completed,
                "error": None if self.error is None else str(self.error),
            },
        )


def run_experiment(config: RunConfig, engine: Optional[PipelineEngine] = None) -> Path:
    """Run every stage and return the artifact directory.  Re-raises the first stage failure."""
    engine = engine or PipelineEngine()
    logger = engine.logger
    for event in engine.run(config):
        if event.event_type is PipelineEventType.STAGE_STARTED:
            logger.info(f"stage {event.stage_id} started")
        elif event.event_type is PipelineEventType.STAGE_PROGRESS:
            logger.debug(f"stage {event.stage_id}: {event.payload}")
        elif event.event_type is PipelineEventType.STAGE_COMPLETED:
            result = event.payload["result"]
            logger.info(
                f"stage {event.stage_id} completed in {result['duration_ms'] / 1000:.1f}s, "
                f"{len(result['outputs'])} outputs"
            )
    if engine.error is not None:
        raise engine.error
    return engine.context.run_dir
