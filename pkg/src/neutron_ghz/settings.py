"""
Settings Configuration Module

This module defines process-level settings for the neutron GHZ toolkit using
Pydantic's BaseSettings, and the structlog configuration applied once by the
command-line entry point.

The settings can be overridden by environment variables or through a .env file.
Environment variables take precedence over values defined in the .env file.
Run parameters of individual experiments live in `neutron_ghz.config`.
"""

import logging
import sys
from functools import lru_cache

import structlog
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from neutron_ghz.exceptions import ConfigError

logger = structlog.get_logger(__name__)


class Settings(BaseSettings):
    """
    Process settings shared by every subcommand.
    """

    # Minimum level of log events written to stderr
    log_level: str = Field(default="WARNING", alias="NEUTRON_GHZ_LOG_LEVEL")
    # Render log events as JSON lines instead of the console format
    log_json: bool = Field(default=False, alias="NEUTRON_GHZ_LOG_JSON")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=True,
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load process settings on first use; a malformed variable raises ConfigError."""
    try:
        return Settings()
    except ValidationError as e:
        fields = ", ".join(str(error["loc"][0]) for error in e.errors())
        msg = f"invalid process settings: {fields}"
        raise ConfigError(msg) from e


def configure_logging(level: str | None = None, *, json: bool | None = None) -> None:
    """
    Configure structlog for a CLI process.

    Events go to stderr so that stdout carries only command output.
    """
    settings = get_settings()
    level_name = (level or settings.log_level).upper()
    levels = logging.getLevelNamesMapping()
    if level_name not in levels:
        msg = f"Unknown log level {level_name!r}"
        raise ConfigError(msg)
    use_json = settings.log_json if json is None else json
    renderer = (
        structlog.processors.JSONRenderer()
        if use_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(levels[level_name]),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    logger.debug("logging_configured", level=level_name, json=use_json)
