"""
Runtime settings
Environment variables (optionally from a .env file) validated into one model
"""

import os
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from .constants import (
    DEFAULT_BASE_OBJECTS,
    DEFAULT_CORPUS_SIZE,
    DEFAULT_MAX_CELLS,
    DEFAULT_WINDOW,
)


class Settings(BaseModel):
    """Validated configuration shared by every command"""

    max_cells: int = Field(DEFAULT_MAX_CELLS, gt=0)
    mode: str = "iso"
    window: Tuple[int, int] = DEFAULT_WINDOW
    paranoid: bool = False
    log_level: str = "WARNING"
    corpus_size: int = Field(DEFAULT_CORPUS_SIZE, ge=0)
    base_objects: int = Field(DEFAULT_BASE_OBJECTS, ge=1)

    @field_validator("mode")
    @classmethod
    def _check_mode(cls, value: str) -> str:
        value = value.lower()
        if value not in ("iso", "equiv"):
            raise ValueError("mode must be 'iso' or 'equiv'")
        return value

    @field_validator("window", mode="before")
    @classmethod
    def _parse_window(cls, value: Any) -> Tuple[int, int]:
        if isinstance(value, str):
            parts = [part.strip() for part in value.replace("x", ",").split(",") if part.strip()]
            if len(parts) != 2:
                raise ValueError("window must look like 'M,N'")
            value = (int(parts[0]), int(parts[1]))
        m, n = value
        if m < 0 or n < 0:
            raise ValueError("window degrees must be non-negative")
        return (int(m), int(n))

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value


def _env_flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).lower() in ["true", "1", "yes"]


def _load_environment() -> Dict[str, Any]:
    """Read settings from environment variables"""
    return {
        'max_cells': int(os.getenv('DBLCAT_MAX_CELLS', str(DEFAULT_MAX_CELLS))),
        'mode': os.getenv('DBLCAT_MODE', 'iso'),
        'window': os.getenv('DBLCAT_WINDOW', "%d,%d" % DEFAULT_WINDOW),
        'paranoid': _env_flag('DBLCAT_PARANOID'),
        'log_level': os.getenv('DBLCAT_LOG_LEVEL', 'WARNING'),
        'corpus_size': int(os.getenv('DBLCAT_CORPUS_SIZE', str(DEFAULT_CORPUS_SIZE))),
        'base_objects': int(os.getenv('DBLCAT_BASE_OBJECTS', str(DEFAULT_BASE_OBJECTS))),
    }


def load_settings(overrides: Optional[Dict[str, Any]] = None) -> Settings:
    """
    Build settings from the environment, then apply explicit overrides

    Args:
        overrides (Dict): values taking precedence (None entries are ignored)

    Returns:
        Settings: validated settings
    """
    values = _load_environment()
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return Settings(**values)


_active: Optional[Settings] = None


def get_settings() -> Settings:
    """Settings in effect for library calls that were not given explicit limits"""
    global _active
    if _active is None:
        _active = load_settings()
    return _active


def use_settings(settings: Settings) -> None:
    """Install settings for the rest of the process (used by the CLI)"""
    global _active
    _active = settings


def resolve_cap(max_cells: Optional[int]) -> int:
    return max_cells if max_cells is not None else get_settings().max_cells
