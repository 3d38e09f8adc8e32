"""Logging configuration using structlog."""

import logging
import os
import sys

import structlog


def _resolve_level(level: str | None) -> int:
    name = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    resolved = logging.getLevelName(name)
    if isinstance(resolved, int):
        return resolved
    print(f"Warning: Invalid LOG_LEVEL '{name}', defaulting to INFO", file=sys.stderr)
    return logging.INFO


def _stderr_logger(*args) -> structlog.PrintLogger:
    # looked up on every call so a swapped sys.stderr is honoured
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(level: str | None = None, json: bool | None = None) -> None:
    """Configure structured logging on stderr.

    Output is pretty and colored when stderr is a TTY and JSON lines with ISO
    UTC timestamps otherwise, so CSV written to stdout or files stays clean.

    Args:
        level: DEBUG, INFO, WARNING, ERROR or CRITICAL; falls back to the
            LOG_LEVEL environment variable, then INFO
        json: Force JSON (True) or console (False) rendering instead of
            detecting a TTY
    """
    log_level = _resolve_level(level)
    use_json = not sys.stderr.isatty() if json is None else json

    if use_json:
        processors = [
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.JSONRenderer(),
        ]
    else:
        processors = [
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="%Y-%m-%d %H:%M:%S", utc=False),
            structlog.dev.ConsoleRenderer(),
        ]

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(log_level),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def bind_run_context(**fields) -> None:
    """Attach run-wide fields (command, seed, study) to every later log line."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(**fields)
