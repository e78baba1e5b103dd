"""
smrep/contracts.py
──────────────────
Single source of truth for run configuration, pipeline events and the manifest.
The CLI, the pipeline engine and every stage import only from here.
"""
from __future__ import annotations

import hashlib
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from smrep.config import settings
from smrep.models.contracts import ArchitectureKind, TrainingConfig
from smrep.nn.checkpoint import canonical_json
from smrep.sim.environment import make_environment
from smrep.utils.exceptions import EnvironmentLayoutError


# ─────────────────────────────────────────────
# Run configuration
# ─────────────────────────────────────────────

class ScalePreset(str, Enum):
    SMOKE = "smoke"  # end-to-end check in seconds
    DESK  = "desk"   # every qualitative result on a laptop
    FULL  = "full"   # original dataset size


SCALE_STEPS: dict[ScalePreset, int] = {
    ScalePreset.SMOKE: 4_000,
    ScalePreset.DESK: 100_000,
    ScalePreset.FULL: 1_000_000,
}
SMOKE_MAX_EPOCHS = 5
SCALE_REPLICATES: dict[ScalePreset, int] = {
    ScalePreset.SMOKE: 1,
    ScalePreset.DESK: 3,
    ScalePreset.FULL: 3,
}


def derive_seed(base: int, *keys: int) -> int:
    """Independent 32-bit seed for (base, keys...); derive_seed(s) differs from s on purpose."""
    return int(np.random.SeedSequence([base, *keys]).generate_state(1)[0])


class SeedConfig(BaseModel):
    """Every random behavior of a run draws from exactly one of these."""
    dataset: int = Field(0, ge=0, description="start pose and exploration policy")
    init: int = Field(1, ge=0, description="network parameter initialization")
    shuffle: int = Field(2, ge=0, description="per-epoch window order")
    sampling: int = Field(3, ge=0, description="cluster report sampling and snapshot picks")
    clustering: int = Field(4, ge=0, description="k-means++ seeding")


class AnalysisConfig(BaseModel):
    k: int = Field(20, gt=0)
    samples_per_cluster: int = Field(500, gt=0)
    corner_radius: float = Field(3.0, gt=0.0)
    facing_tolerance: float = Field(0.6, gt=0.0)
    transfer_architecture: ArchitectureKind = ArchitectureKind.RECURRENT_SM
    raw_baseline: bool = True  # also cluster the normalized sensor space


class RunConfig(BaseModel):
    """
    One reproducible experiment.  JSON on disk; round-trips through
    ``model_dump_json`` / ``model_validate_json`` without loss.
    """
    name: str = "repro"
    scale: ScalePreset = ScalePreset.DESK
    steps: Optional[int] = Field(None, ge=10, description="overrides the scale preset's dataset length")
    environments: list[str] = Field(default_factory=lambda: ["square", "rooms1", "rooms2"], min_length=1)
    train_environment: str = "square"
    architectures: list[ArchitectureKind] = Field(default_factory=lambda: list(ArchitectureKind), min_length=1)
    replicates: int = Field(3, ge=1, description="defaults per scale preset")
    seeds: SeedConfig = Field(default_factory=SeedConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    trajectory_points: int = Field(10_000, ge=0)
    snapshots: int = Field(0, ge=0)
    output_dir: Path = Field(default_factory=lambda: settings.output_root / "repro")
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _scale_defaults(cls, data: Any) -> Any:
        """Smoke runs cap epochs; replicates follow the scale unless given."""
        if not isinstance(data, dict):
            return data
        try:
            scale = ScalePreset(data.get("scale", ScalePreset.DESK))
        except ValueError:
            return data
        if scale is ScalePreset.SMOKE and "training" not in data:
            data = {**data, "training": {"max_epochs": SMOKE_MAX_EPOCHS}}
        if data.get("replicates") is None:
            data = {**data, "replicates": SCALE_REPLICATES[scale]}
        return data

    @field_validator("environments")
    @classmethod
    def _valid_environments(cls, value: list[str]) -> list[str]:
        keys = [environment_key(v) for v in value]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate environments in {value}")
        for layout in value:
            try:
                make_environment(layout)
            except EnvironmentLayoutError as exc:
                raise ValueError(str(exc)) from exc
        return value

    @model_validator(mode="after")
    def _train_environment_listed(self) -> "RunConfig":
        if environment_key(self.train_environment) not in [environment_key(e) for e in self.environments]:
            raise ValueError(
                f"train_environment '{self.train_environment}' is not one of environments {self.environments}"
            )
        return self

    @property
    def total_steps(self) -> int:
        return self.steps if self.steps is not None else SCALE_STEPS[self.scale]

    def config_hash(self) -> str:
        """sha256 of everything that determines outputs (not output_dir, not workers)."""
        payload = self.model_dump(mode="json", exclude={"output_dir", "workers"})
        return hashlib.sha256(canonical_json(payload)).hexdigest()

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        return cls.model_validate_json(Path(path).read_text())

    def to_file(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n")
        return path


def environment_key(layout: str) -> str:
    """File-name key of a layout: preset name lower-cased, or a JSON file's stem."""
    return Path(layout).stem.lower() if layout.endswith(".json") else layout.lower()


# ─────────────────────────────────────────────
# Pipeline stages
# ─────────────────────────────────────────────

class StageType(str, Enum):
    """
    Registry of known stages.
    Add a value here + register the class in pipeline/registry.py.
    """
    GENERATE  = "generate"
    TRAIN     = "train"
    EVALUATE  = "evaluate"
    REPRESENT = "represent"
    CLUSTER   = "cluster"
    TRANSFER  = "transfer"
    MANIFEST  = "manifest"


class StageConfig(BaseModel):
    stage_id: str
    stage_type: StageType
    params: dict[str, Any] = Field(default_factory=dict)


DEFAULT_STAGES: list[StageType] = list(StageType)


# ─────────────────────────────────────────────
# Events
# ─────────────────────────────────────────────

class PipelineEventType(str, Enum):
    PIPELINE_STARTED   = "pipeline.started"
    STAGE_STARTED      = "stage.started"
    STAGE_PROGRESS     = "stage.progress"
    STAGE_COMPLETED    = "stage.completed"
    PIPELINE_COMPLETED = "pipeline.completed"
    PIPELINE_ERROR     = "pipeline.error"


class PipelineEvent(BaseModel):
    event_type: PipelineEventType
    run_name: str
    stage_id: Optional[str] = None          # None for pipeline-level events
    sequence: int = 0                        # monotonic counter per run
    payload: dict[str, Any] = Field(default_factory=dict)
    emitted_at: datetime = Field(default_factory=datetime.utcnow)


class StageResult(BaseModel):
    stage_id: str
    stage_type: StageType
    outputs: list[str] = Field(default_factory=list)  # paths relative to the run directory
    summary: dict[str, Any] = Field(default_factory=dict)
    duration_ms: float = 0.0


# ─────────────────────────────────────────────
# Manifest
# ─────────────────────────────────────────────

class Manifest(BaseModel):
    """Everything needed to re-run a configuration and check its outputs byte for byte."""
    config: RunConfig
    config_hash: str
    versions: dict[str, str]
    seeds: SeedConfig
    outputs: dict[str, str] = Field(default_factory=dict)  # relative path → sha256
