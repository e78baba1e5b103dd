"""Ambient settings for smrep."""

from pathlib import Path
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings, overridable through SMREP_* environment variables."""

    log_level: str = "INFO"
    output_root: Path = Path("runs")

    # Numerics
    float_dtype: Literal["float64", "float32"] = "float64"

    # Execution
    workers: int = 1
    progress_every: int = 100_000  # simulator steps between progress logs

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="SMREP_",
        case_sensitive=False,
    )


# Global settings instance
settings = Settings()
