"""Service configuration: one YAML file, overridable from the environment.

Every setting has a sane default, so a bare ``Settings()`` runs a local
instance. Environment variables win over the file; they are named
``PHYLOGRAPH_<FIELD>`` (e.g. ``PHYLOGRAPH_STORE_DIR``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

ENV_PREFIX = "PHYLOGRAPH_"


@dataclass(frozen=True, slots=True)
class Settings:
    host: str = "127.0.0.1"
    port: int = 8000
    store_dir: str = "./phylograph-data"
    token_secret: str = ""
    token_provider: str = "hmac"  # "hmac" or "remote"
    verify_url: str = ""  # remote provider only
    default_page_limit: int = 20
    worker_poll_interval: float = 0.05

    def __post_init__(self) -> None:
        if self.token_provider not in ("hmac", "remote"):
            raise ValueError(
                f"unknown token provider {self.token_provider!r}")
        if not 1 <= self.default_page_limit <= 1000:
            raise ValueError("default_page_limit must be within [1, 1000]")
        if self.worker_poll_interval <= 0:
            raise ValueError("worker_poll_interval must be positive")


def load_settings(path: str | Path | None = None,
                  env: Mapping[str, str] | None = None) -> Settings:
    """Merge defaults ← YAML file ← environment, in that order."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    if path is not None:
        loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path} must hold a mapping")
        unknown = set(loaded) - {f.name for f in fields(Settings)}
        if unknown:
            raise ValueError(
                f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    for field in fields(Settings):
        raw = env.get(ENV_PREFIX + field.name.upper())
        if raw is None:
            continue
        if field.type in ("int", int):
            values[field.name] = int(raw)
        elif field.type in ("float", float):
            values[field.name] = float(raw)
        else:
            values[field.name] = raw
    return Settings(**values)
