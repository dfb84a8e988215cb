"""
Engine Configuration

Settings for scans and the quadrature oracle. Values come from built-in
defaults, then ``UNRUH_OTTO_*`` environment variables, then an optional
flat ``key = value`` config file, then command-line flags.
"""

import os
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from .constants import (
    ENV_PREFIX,
    LERCH_DEFAULT_REL_TOL,
    LERCH_MAX_REL_TOL,
    LERCH_MIN_REL_TOL,
    ORACLE_ABS_TOL,
    ORACLE_DOMAIN_HALF_WIDTH,
    ORACLE_EPSILON_SCHEDULE,
    ORACLE_N_MAX,
    ORACLE_REL_TOL,
)
from .errors import ConfigError, ValidationError
from .kinematics import ClockConvention
from .oracle import OracleMode, QuadratureConfig
from .utils import parse_float_list


class OutputFormat(str, Enum):
    """Output formats of the command line."""
    CSV = "csv"
    JSON = "json"
    TEXT = "text"


class LogFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


def _env(name: str, default: str) -> str:
    return os.getenv(f"{ENV_PREFIX}{name.upper()}", default)


def _optional_format(value: str) -> Optional[OutputFormat]:
    return OutputFormat(value) if value else None


def _to_bool(value: str) -> bool:
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _to_schedule(value: Any) -> Tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(parse_float_list(value))


@dataclass
class ScanSettings:
    """Grid evaluation settings."""
    workers: int = field(default_factory=lambda: int(_env("workers", "0")))  # 0: one per processor
    # None: per-command default
    format: Optional[OutputFormat] = field(default_factory=lambda: _optional_format(_env("format", "")))
    lerch_rel_tol: float = field(default_factory=lambda: float(_env("lerch_rel_tol", str(LERCH_DEFAULT_REL_TOL))))
    clock: ClockConvention = field(default_factory=lambda: ClockConvention(_env("clock", "lorentz")))


@dataclass
class OracleSettings:
    """Quadrature oracle settings."""
    epsilon_schedule: Tuple[float, ...] = field(
        default_factory=lambda: _to_schedule(_env("epsilon_schedule", ",".join(map(str, ORACLE_EPSILON_SCHEDULE))))
    )
    n_max: int = field(default_factory=lambda: int(_env("n_max", str(ORACLE_N_MAX))))
    domain_half_width: float = field(default_factory=lambda: float(_env("domain_half_width", str(ORACLE_DOMAIN_HALF_WIDTH))))
    rel_tol: float = field(default_factory=lambda: float(_env("rel_tol", str(ORACLE_REL_TOL))))
    abs_tol: float = field(default_factory=lambda: float(_env("abs_tol", str(ORACLE_ABS_TOL))))
    oracle_mode: OracleMode = field(default_factory=lambda: OracleMode(_env("oracle_mode", "2d")))

    def quadrature_config(self) -> QuadratureConfig:
        """
        Build the validated quadrature configuration.

        Raises:
            ValidationError: If the settings violate a QuadratureConfig invariant
        """
        return QuadratureConfig(
            epsilon_schedule=self.epsilon_schedule,
            n_max=self.n_max,
            domain_half_width=self.domain_half_width,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
        )


# Recognised config keys: (section, converter)
_CONVERTERS: Dict[str, Tuple[str, Callable[[Any], Any]]] = {
    "workers": ("scan", int),
    "format": ("scan", OutputFormat),
    "lerch_rel_tol": ("scan", float),
    "clock": ("scan", ClockConvention),
    "epsilon_schedule": ("oracle", _to_schedule),
    "n_max": ("oracle", int),
    "domain_half_width": ("oracle", float),
    "rel_tol": ("oracle", float),
    "abs_tol": ("oracle", float),
    "oracle_mode": ("oracle", OracleMode),
    "log_level": ("engine", str),
    "log_format": ("engine", LogFormat),
    "debug": ("engine", _to_bool),
}


@dataclass
class EngineSettings:
    """Complete configuration of the command-line tools."""
    scan: ScanSettings = field(default_factory=ScanSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    log_level: str = field(default_factory=lambda: _env("log_level", "WARNING"))
    log_format: LogFormat = field(default_factory=lambda: LogFormat(_env("log_format", "text")))
    debug: bool = field(default_factory=lambda: _to_bool(_env("debug", "false")))

    @classmethod
    def from_env(cls) -> "EngineSettings":
        """
        Create settings from defaults and environment variables.

        Raises:
            ConfigError: If an environment variable holds an unparsable value
        """
        try:
            return cls(scan=ScanSettings(), oracle=OracleSettings())
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"invalid {ENV_PREFIX}* environment value: {e}") from e

    @classmethod
    def load(cls, config_file: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> "EngineSettings":
        """Settings with precedence flags > config file > environment > defaults."""
        settings = cls.from_env()
        if config_file:
            settings.update_from_file(config_file)
        if overrides:
            settings.update({k: v for k, v in overrides.items() if v is not None}, source="command line")
        return settings

    def update_from_file(self, path: str) -> None:
        """
        Apply a flat ``key = value`` config file.

        Raises:
            ConfigError: If the file is missing, has keys without values or unknown keys
        """
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        values = dotenv_values(config_path)
        empty = [key for key, value in values.items() if value is None or value == ""]
        if empty:
            raise ConfigError(f"{config_path}: keys without values: {', '.join(sorted(empty))}")
        self.update(values, source=str(config_path))

    def update(self, values: Mapping[str, Any], source: str = "settings") -> None:
        """
        Set settings by key.

        Raises:
            ConfigError: On unknown keys or unparsable values
        """
        unknown = sorted(key for key in values if key.lower() not in _CONVERTERS)
        if unknown:
            raise ConfigError(f"{source}: unknown keys: {', '.join(unknown)} (known: {', '.join(sorted(_CONVERTERS))})")

        for key, raw in values.items():
            key = key.lower()
            section, convert = _CONVERTERS[key]
            try:
                value = convert(raw)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"{source}: invalid value for {key}: {raw!r} ({e})") from e
            target = self if section == "engine" else getattr(self, section)
            setattr(target, key, value)

    def validate(self) -> list[str]:
        """Validate settings and return a list of errors."""
        errors = []

        if self.scan.workers < 0:
            errors.append("workers cannot be negative")

        if not (LERCH_MIN_REL_TOL <= self.scan.lerch_rel_tol <= LERCH_MAX_REL_TOL):
            errors.append(f"lerch_rel_tol must lie in [{LERCH_MIN_REL_TOL:g}, {LERCH_MAX_REL_TOL:g}]")

        try:
            self.oracle.quadrature_config()
        except ValidationError as e:
            errors.append(str(e))

        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"log_level must be a standard level name, got {self.log_level!r}")

        return errors

    def as_dict(self) -> Dict[str, Any]:
        """Flat view keyed like the config file."""
        flat: Dict[str, Any] = {}
        for section in (self.scan, self.oracle):
            for f in fields(section):
                value = getattr(section, f.name)
                flat[f.name] = value.value if isinstance(value, Enum) else value
        flat["log_level"] = self.log_level
        flat["log_format"] = self.log_format.value
        flat["debug"] = self.debug
        return flat
