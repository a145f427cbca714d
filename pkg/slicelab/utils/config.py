"""
Configuration management for slicelab
Search budgets, seeds and checkpoint storage, read from SLICERANK_* variables
"""

import logging
import os
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from slicelab.algebra.field import FieldSpec
from slicelab.utils.errors import FieldError


class Settings(BaseSettings):
    """
    Application settings with environment variable support.
    Every field can be set as SLICERANK_<NAME> or in a .env file.
    """

    model_config = SettingsConfigDict(
        env_prefix="SLICERANK_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Application settings
    debug: bool = Field(default=False, description="Debug mode")
    log_level: str = Field(default="INFO", description="Logging level")

    # Reproducibility
    seed: int = Field(default=0, description="Default seed for randomized suites")
    default_field: str = Field(default="gf2", description="Field flag used when --field is omitted")

    # Search budget
    workers: int = Field(
        default_factory=lambda: min(os.cpu_count() or 1, 8),
        description="Parallel workers for Grassmannian scans",
    )
    max_visits: int = Field(default=10**8, description="Hard cap on subspace visits per search")
    max_seconds: Optional[float] = Field(default=None, description="Wall-clock cap per search (seconds)")
    chunk_size: int = Field(default=4096, description="RREF matrices per vectorized membership batch")
    essential_search_max_visits: int = Field(
        default=10**6,
        description="Subspace budget for the small-characteristic essential-variable search",
    )

    # Checkpoints
    checkpoint_url: Optional[str] = Field(default=None, description="SQLite path or URL for resumable searches")

    # Verification suites
    resample_cap: int = Field(default=100, description="Resampling cap for trivial-intersection families")
    oracle_max_dim: int = Field(default=22, description="Largest graded dimension the brute-force oracle accepts")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Only accept names the logging module knows."""
        name = v.upper()
        if not isinstance(logging.getLevelName(name), int):
            raise ValueError(f"Unknown log level: {v}")
        return name

    @field_validator("default_field")
    @classmethod
    def validate_default_field(cls, v: str) -> str:
        """The default field must be a valid --field flag."""
        try:
            FieldSpec.parse(v)
        except FieldError as e:
            raise ValueError(e.message) from e
        return v

    @field_validator("workers")
    @classmethod
    def clamp_workers(cls, v: int) -> int:
        return max(1, v)

    @field_validator("checkpoint_url")
    @classmethod
    def validate_checkpoint_url(cls, v: Optional[str]) -> Optional[str]:
        return normalize_checkpoint_url(v)


def normalize_checkpoint_url(v: Optional[str]) -> Optional[str]:
    """Ensure the checkpoint URL is properly formatted for async SQLite."""
    if not v:
        return None

    if v.startswith("sqlite+aiosqlite://"):
        return v

    if not v.startswith(("sqlite:///", "./", "/")):
        v = f"./{v}"

    if v.startswith("sqlite:///"):
        return v.replace("sqlite:///", "sqlite+aiosqlite:///", 1)
    return f"sqlite+aiosqlite:///{v}"


# Create settings instance
settings = Settings()
