"""Solver limits and defaults.

Values come from (lowest to highest precedence) the built-in defaults, a YAML
file and ``ROOMMATES_<FIELD>`` environment variables. The YAML file is the one
passed explicitly, else ``$ROOMMATES_CONFIG``, else
``~/.config/roommates/config.yaml`` when it exists.
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from .errors import DomainError
from .logger import get_logger

logger = get_logger(__name__)

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "roommates" / "config.yaml"

FAMILY_CHOICES = ("combinatorial", "exhaustive", "random")


@dataclass(frozen=True)
class Settings:
    """Tunable limits shared by the solvers and the oracle."""
    oracle_max_agents: int = 16
    oracle_max_edges: int = 64
    exhaustive_cap: int = 16
    max_random_trials: int = 20000
    default_family: str = "combinatorial"
    default_seed: int = 0
    jobs: int = 1


def _coerce(name: str, value, source: str):
    if name == "default_family":
        value = str(value)
        if value not in FAMILY_CHOICES:
            raise DomainError(f"{source}: default_family must be one of {', '.join(FAMILY_CHOICES)}")
        return value
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"{source}: {name} must be an integer, got {value!r}")
    if number < 0:
        raise DomainError(f"{source}: {name} must be nonnegative")
    return number


def _read_yaml(path: Path) -> dict:
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise DomainError(f"{path}: config file must contain a mapping")
    return data


def load_settings(path: Path | str | None = None) -> Settings:
    """Build settings from defaults, the YAML file and the environment.

    Args:
        path: Explicit config file; overrides ``$ROOMMATES_CONFIG``

    Returns:
        Resolved Settings
    """
    settings = Settings()
    known = {f.name for f in fields(Settings)}

    if path is None and os.environ.get("ROOMMATES_CONFIG"):
        path = os.environ["ROOMMATES_CONFIG"]
    if path is None and DEFAULT_CONFIG_PATH.exists():
        path = DEFAULT_CONFIG_PATH

    if path is not None:
        config_path = Path(path).expanduser()
        data = _read_yaml(config_path)
        unknown = sorted(set(data) - known)
        if unknown:
            raise DomainError(f"{config_path}: unknown settings {', '.join(unknown)}")
        settings = replace(settings, **{k: _coerce(k, v, str(config_path)) for k, v in data.items()})
        logger.debug(f"Loaded settings from {config_path}")

    overrides = {}
    for name in known:
        env_value = os.environ.get(f"ROOMMATES_{name.upper()}")
        if env_value is not None:
            overrides[name] = _coerce(name, env_value, f"ROOMMATES_{name.upper()}")
    if overrides:
        settings = replace(settings, **overrides)

    return settings


_settings: Settings | None = None


def get_settings() -> Settings:
    """Process-wide settings, loaded on first use."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def use_settings(settings: Settings | None) -> None:
    """Install settings for the rest of the process (None resets to lazy loading)."""
    global _settings
    _settings = settings
