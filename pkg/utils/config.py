"""
Configuration Loader
File: utils/config.py

Reads project settings from environment variables, after loading an optional
.env file from the project root with python-dotenv. Every setting has a
default, so the engine runs without any .env file present.

Keys (see .env.example):
    HDEFORM_LOG_LEVEL        console log level (DEBUG, INFO, WARNING, ...)
    HDEFORM_LOG_DIR          folder for the rotating log file
    HDEFORM_MAX_DIMENSION    largest N accepted by the command line
    HDEFORM_RESIDUAL_LIMIT   residual entries kept in a failed report
    HDEFORM_GOLDEN_DIR       folder holding the published listings (CSV)
"""

# Imports from Python Standard Library
import os
import pathlib
from dataclasses import dataclass
from functools import lru_cache

# Imports from external packages
from dotenv import load_dotenv

PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
ENV_FILE: pathlib.Path = PROJECT_ROOT.joinpath(".env")

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class ConfigError(ValueError):
    """Raised when an environment setting cannot be interpreted."""


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    log_dir: pathlib.Path = PROJECT_ROOT.joinpath("logs")
    max_dimension: int = 8
    residual_limit: int = 20
    golden_dir: pathlib.Path = PROJECT_ROOT.joinpath("data", "golden")


def _resolve_path(raw: str) -> pathlib.Path:
    path = pathlib.Path(raw)
    return path if path.is_absolute() else PROJECT_ROOT.joinpath(path)


def _read_int(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'.")
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}.")
    return value


def read_settings() -> Settings:
    """
    Build a Settings object from the current environment.

    Returns:
        Settings: The validated settings.

    Raises:
        ConfigError: If a value is malformed or out of range.
    """
    defaults = Settings()
    level = os.getenv("HDEFORM_LOG_LEVEL", defaults.log_level).strip().upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"HDEFORM_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got '{level}'.")

    log_dir = os.getenv("HDEFORM_LOG_DIR")
    golden_dir = os.getenv("HDEFORM_GOLDEN_DIR")
    return Settings(
        log_level=level,
        log_dir=_resolve_path(log_dir) if log_dir else defaults.log_dir,
        max_dimension=_read_int("HDEFORM_MAX_DIMENSION", defaults.max_dimension, minimum=2),
        residual_limit=_read_int("HDEFORM_RESIDUAL_LIMIT", defaults.residual_limit, minimum=1),
        golden_dir=_resolve_path(golden_dir) if golden_dir else defaults.golden_dir,
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load the .env file once and return the cached settings."""
    load_dotenv(ENV_FILE, override=False)
    return read_settings()
