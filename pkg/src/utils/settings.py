"""
Environment-backed settings.

Values come from the process environment, optionally seeded from a local `.env` file.
Command-line flags take precedence over everything read here.
"""

import os
from typing import Optional

from dotenv import load_dotenv

from src.utils.errors import ConfigError

load_dotenv()

DEFAULT_REASONER_TIMEOUT_MS = 10_000


def reasoner_url() -> Optional[str]:
    value = os.getenv("REASONER_URL", "").strip()
    return value or None


def reasoner_timeout_ms() -> int:
    raw = os.getenv("REASONER_TIMEOUT_MS", "").strip()
    if not raw:
        return DEFAULT_REASONER_TIMEOUT_MS
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"REASONER_TIMEOUT_MS must be an integer, got {raw!r}") from e
    if value <= 0:
        raise ConfigError(f"REASONER_TIMEOUT_MS must be positive, got {value}")
    return value


def log_level() -> str:
    return os.getenv("LOG_LEVEL", "INFO")
