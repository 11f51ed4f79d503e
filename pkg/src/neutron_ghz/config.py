"""
Run Configuration Module

Parameters of one simulated experiment, read from a flat plain-text file:

    # comment
    visibility = 0.6395
    counts_per_point = 250

Values are validated by pydantic. Precedence is command-line flags, then the
file, then NEUTRON_GHZ_RUN_* environment variables, then field defaults.
"""

import math
from collections.abc import Mapping
from enum import Enum
from pathlib import Path
from typing import Any, Final

import structlog
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from neutron_ghz.exceptions import ConfigError
from neutron_ghz.experiment import DEFAULT_VISIBILITY, NoiseModel

logger = structlog.get_logger(__name__)

COMMENT: Final[str] = "#"


class RunConfig(BaseSettings):
    """
    Parameters of a scan or Mermin run.

    Attributes:
        visibility: Fringe visibility V of the simulated state
        counts_per_point: Mean counts per scan point (fringe offset)
        points_per_scan: Path phases per scan, equally spaced over [0, 2*pi)
        repeats: Repeated scans per (alpha, gamma) setting
        seed: Root seed of the counting noise
        rf_phase: Phase of the RF field in the flipper, radians
        significance_k: Standard errors by which |M| must exceed 2
        noise_model: State noise family that produces the contrast loss
        noiseless: Use expected intensities instead of Poisson counts
    """

    visibility: float = Field(default=DEFAULT_VISIBILITY, ge=0.0, le=1.0)
    counts_per_point: int = Field(default=250, gt=0)
    points_per_scan: int = Field(default=32, ge=5)
    repeats: int = Field(default=4, ge=1)
    seed: int = Field(default=1, ge=0, lt=2**64)
    rf_phase: float = 0.0
    significance_k: float = Field(default=3.0, ge=0.0)
    noise_model: NoiseModel = NoiseModel.DEPHASE
    noiseless: bool = False

    model_config = SettingsConfigDict(
        env_prefix="NEUTRON_GHZ_RUN_",
        frozen=True,
        extra="forbid",
    )

    @field_validator("rf_phase", "significance_k", "visibility")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            msg = "must be finite"
            raise ValueError(msg)
        return value

    def to_text(self) -> str:
        """Serialise in the `key = value` file format."""
        lines = []
        for name, value in self.model_dump().items():
            lines.append(f"{name} = {_format_value(value)}")
        return "\n".join(lines) + "\n"

    def echo(self) -> dict[str, str]:
        """Field values as strings, for reports."""
        return {name: _format_value(value) for name, value in self.model_dump().items()}


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config_text(text: str) -> dict[str, tuple[str, int]]:
    """
    Parse `key = value` lines into {key: (value, line_number)}.

    Blank lines and `#` comments are skipped; unknown or repeated keys and
    lines without `=` raise ConfigError with their line number.
    """
    known = set(RunConfig.model_fields)
    values: dict[str, tuple[str, int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(COMMENT, 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            msg = f"expected 'key = value', got {raw.strip()!r}"
            raise ConfigError(msg, line=number)
        if key not in known:
            msg = f"unknown key {key!r}"
            raise ConfigError(msg, line=number)
        if key in values:
            msg = f"duplicate key {key!r} (first set on line {values[key][1]})"
            raise ConfigError(msg, line=number)
        if not value:
            msg = f"missing value for {key!r}"
            raise ConfigError(msg, line=number)
        values[key] = (value, number)
    return values


def build_run_config(
    file_values: Mapping[str, tuple[str, int]] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Validate file values and flag overrides into a RunConfig."""
    file_values = file_values or {}
    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    merged: dict[str, Any] = {key: value for key, (value, _) in file_values.items()}
    merged.update(flags)
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        error = e.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else ""
        line = None
        if field in file_values and field not in flags:
            line = file_values[field][1]
        msg = f"invalid {field}: {error['msg']}"
        raise ConfigError(msg, line=line) from e


def load_run_config(
    path: Path | None = None, overrides: Mapping[str, Any] | None = None
) -> RunConfig:
    """Read an optional config file and apply command-line overrides."""
    file_values: dict[str, tuple[str, int]] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            msg = f"config file is not valid UTF-8 at byte {e.start}"
            raise ConfigError(msg) from e
        file_values = parse_config_text(text)
        logger.debug("config_file_read", path=str(path), keys=sorted(file_values))
    config = build_run_config(file_values, overrides)
    logger.debug("run_config_loaded", **config.echo())
    return config
