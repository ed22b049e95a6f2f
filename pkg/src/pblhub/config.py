"""Service configuration: JSON config file with environment overrides.

Precedence: built-in defaults < config file < PBLHUB_* environment variables.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidConfig

_ENV_PREFIX = "PBLHUB_"


@dataclass
class ServiceConfig:
    port: int = 8600
    host: str = "127.0.0.1"
    storage: str = "./data/events.jsonl"
    questionnaire: str | None = None
    token_ttl_s: int = 8 * 3600
    poll_interval_s: int = 30  # advertised to clients; they poll, we never push
    ui_dir: str | None = None

    @classmethod
    def load(cls, path: str | Path | None = None,
             env: dict[str, str] | None = None) -> "ServiceConfig":
        values: dict = {}
        if path is not None:
            try:
                raw = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise InvalidConfig(f"config file unreadable: {exc}") from exc
            if not isinstance(raw, dict):
                raise InvalidConfig("config file must hold a JSON object")
            unknown = set(raw) - set(cls.__dataclass_fields__)
            if unknown:
                raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
            values.update(raw)
        env = dict(os.environ if env is None else env)
        for name in cls.__dataclass_fields__:
            key = _ENV_PREFIX + name.upper()
            if key in env:
                values[name] = env[key]
        config = cls(**{k: v for k, v in values.items()})
        config._coerce()
        return config

    def _coerce(self) -> None:
        try:
            self.port = int(self.port)
            self.token_ttl_s = int(self.token_ttl_s)
            self.poll_interval_s = int(self.poll_interval_s)
        except (TypeError, ValueError):
            raise InvalidConfig("port/token_ttl_s/poll_interval_s must be integers") from None
        if not 0 < self.port < 65536:
            raise InvalidConfig(f"port out of range: {self.port}")
        if self.token_ttl_s <= 0 or self.poll_interval_s <= 0:
            raise InvalidConfig("ttl and poll interval must be positive")
