"""Stage pipeline: generate → train → evaluate → represent → cluster → transfer → manifest."""

from smrep.pipeline.base import BaseStage, RunContext
from smrep.pipeline.builtin import verify_outputs
from smrep.pipeline.engine import PipelineEngine, default_stages, run_experiment
from smrep.pipeline.registry import registry

__all__ = [
    "BaseStage",
    "PipelineEngine",
    "RunContext",
    "default_stages",
    "registry",
    "run_experiment",
    "verify_outputs",
]
