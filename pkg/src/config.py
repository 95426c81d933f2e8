from __future__ import annotations

import logging
import os
from dataclasses import dataclass

from .errors import ConfigError


def _env(name: str, default: str | None = None) -> str | None:
    v = os.getenv(name)
    if v is None or v.strip() == "":
        return default
    return v.strip()


def _env_int(name: str, default: int, minimum: int = 0) -> int:
    v = _env(name)
    if v is None:
        return default
    try:
        out = int(v)
    except ValueError:
        raise ConfigError(f"Environment variable {name} must be an integer, got {v!r}") from None
    if out < minimum:
        raise ConfigError(f"Environment variable {name} must be >= {minimum}, got {out}")
    return out


@dataclass(frozen=True)
class Config:
    log_level: int

    # sqlite file for audit records; None disables caching
    cache_path: str | None
    cache_ttl_days: int

    workers: int
    audit_chunk_size: int
    heartbeat_every: int


def load_config() -> Config:
    level_name = (_env("GME_LOG_LEVEL", "INFO") or "INFO").upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise ConfigError(f"Unknown GME_LOG_LEVEL: {level_name}")

    return Config(
        log_level=level,
        cache_path=_env("GME_CACHE_PATH"),
        cache_ttl_days=_env_int("GME_CACHE_TTL_DAYS", 30, minimum=1),
        workers=_env_int("GME_WORKERS", 1, minimum=1),
        audit_chunk_size=_env_int("GME_AUDIT_CHUNK", 250, minimum=1),
        heartbeat_every=_env_int("GME_HEARTBEAT_EVERY", 250, minimum=1),
    )
