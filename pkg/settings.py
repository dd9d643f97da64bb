"""
Runtime settings and logging setup.

Settings come from the environment (optionally a ``.env`` file) and are
validated once; logging is structured (key/value events) and always written
to standard error so that standard output stays machine-readable.
"""

import logging
import os
import sys
from functools import lru_cache
from typing import Optional

import structlog
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

# Load environment variables
load_dotenv()

# Constants
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_QUAD_TOL = 1e-4
DEFAULT_MAX_DEPTH = 24
DEFAULT_MC_SAMPLES = 1_000_000
DEFAULT_SEED = 1
DEFAULT_CURVE_T_CAP = 1e4

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class FareySettings(BaseModel):
    """Process-wide configuration, read from the environment."""

    log_level: str = DEFAULT_LOG_LEVEL
    log_file: Optional[str] = None
    threads: int = Field(default=1, ge=1)
    quad_tol: float = Field(default=DEFAULT_QUAD_TOL, gt=0)
    max_depth: int = Field(default=DEFAULT_MAX_DEPTH, ge=1, le=60)
    mc_samples: int = Field(default=DEFAULT_MC_SAMPLES, ge=1)
    seed: int = DEFAULT_SEED
    curve_t_cap: float = Field(default=DEFAULT_CURVE_T_CAP, gt=0)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in _LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(_LEVELS)}")
        return level

    @classmethod
    def from_env(cls) -> "FareySettings":
        """
        Build settings from environment variables.

        Raises:
            ValueError: If a variable holds an invalid value
        """
        mapping = {
            "log_level": "LOG_LEVEL",
            "log_file": "FAREY_LOG_FILE",
            "threads": "FAREY_THREADS",
            "quad_tol": "FAREY_QUAD_TOL",
            "max_depth": "FAREY_MAX_DEPTH",
            "mc_samples": "FAREY_MC_SAMPLES",
            "seed": "FAREY_SEED",
            "curve_t_cap": "FAREY_CURVE_T_CAP",
        }
        values = {
            field: os.environ[var]
            for field, var in mapping.items()
            if os.environ.get(var, "") != ""
        }
        return cls(**values)


@lru_cache(maxsize=1)
def get_settings() -> FareySettings:
    """Settings for this process (read once)."""
    return FareySettings.from_env()


def configure_logging(settings: Optional[FareySettings] = None) -> None:
    """Route structlog events to standard error, and to a file when configured."""
    settings = settings or get_settings()
    level = getattr(logging, settings.log_level)

    handlers: list = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=handlers,
        force=True,
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.format_exc_info,
            structlog.processors.KeyValueRenderer(
                key_order=["timestamp", "level", "logger", "event"]
            ),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
