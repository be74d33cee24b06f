import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from model.errors import ConfigError

CONFIG_FILE_NAME = "irs.yaml"
CONFIG_KEYS = {"profile", "workers", "threshold", "log_level"}


@dataclass(frozen=True)
class Settings:
    """
    Runtime settings shared by the CLI and the batch workflows.

    Attributes:
        profile_path (Path, optional): Calibration profile file; None means the shipped default.
        workers (int): Size of the scoring worker pool.
        threshold (float, optional): Override for the profile's decision threshold.
        log_level (str): Logging level name for the stderr handler.
    """
    profile_path: Optional[Path] = None
    workers: int = 1
    threshold: Optional[float] = None
    log_level: str = "WARNING"

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.threshold is not None and self.threshold <= 0:
            raise ConfigError(f"threshold must be > 0, got {self.threshold}")


def _read_config_file(path: Path) -> Dict[str, Any]:
    """Read the optional YAML configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a mapping")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"Unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return data


def _coerce(settings: Settings, values: Dict[str, Any], source: str) -> Settings:
    changes = {}
    try:
        if values.get("profile"):
            changes["profile_path"] = Path(values["profile"]).expanduser()
        if values.get("workers") not in (None, ""):
            changes["workers"] = int(values["workers"])
        if values.get("threshold") not in (None, ""):
            changes["threshold"] = float(values["threshold"])
        if values.get("log_level"):
            changes["log_level"] = str(values["log_level"]).upper()
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid setting in {source}: {e}") from e
    return replace(settings, **changes)


def get_settings(config_path: Optional[Path] = None) -> Settings:
    """
    Resolve settings from defaults, the YAML config file and the environment.

    Later sources win: defaults < YAML file < environment variables. CLI flags
    are applied on top by the caller.

    Args:
        config_path (Path, optional): Explicit config file; falls back to IRS_CONFIG,
            then to irs.yaml in the working directory if it exists.

    Returns:
        Settings: The resolved settings.
    """
    load_dotenv()
    settings = Settings()

    if config_path is None:
        env_path = os.getenv("IRS_CONFIG")
        if env_path:
            config_path = Path(env_path)
        elif Path(CONFIG_FILE_NAME).exists():
            config_path = Path(CONFIG_FILE_NAME)

    if config_path is not None:
        if not config_path.exists():
            raise ConfigError(f"Config file not found at {config_path}")
        settings = _coerce(settings, _read_config_file(config_path), str(config_path))

    env_values = {
        "profile": os.getenv("IRS_PROFILE"),
        "workers": os.getenv("IRS_WORKERS"),
        "log_level": os.getenv("IRS_LOG_LEVEL"),
    }
    return _coerce(settings, env_values, "environment")
