"""Environment-driven settings."""

import logging
import os

from .errors import InputError

THREADS_ENV = "BERNSTEIN_LAB_THREADS"
LOG_LEVEL_ENV = "BERNSTEIN_LAB_LOG_LEVEL"


def thread_count() -> int:
    """Worker cap for internal thread pools (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def log_level() -> int:
    name = os.environ.get(LOG_LEVEL_ENV, "WARNING").strip().upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING
