"""Flat `key = value` config files for reproducible pipeline runs.

One setting per line, `#` starts a comment, keys mirror module parameter
names.  Unknown keys are rejected so typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

import hashlib

from .errors import ConfigError


def parse_config(path: str, allowed_keys: set[str]) -> dict[str, str]:
    settings: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
            key, value = (part.strip() for part in text.split("=", 1))
            if key not in allowed_keys:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in settings:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            settings[key] = value
    return settings


def parse_pair(value: str, cast=float) -> tuple:
    parts = [p for p in value.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ConfigError(f"expected two values, got {value!r}")
    return (cast(parts[0]), cast(parts[1]))


def parse_triple(value: str, cast=float) -> tuple:
    parts = [p for p in value.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ConfigError(f"expected three values, got {value!r}")
    return tuple(cast(p) for p in parts)


def config_hash(settings: dict) -> str:
    canon = "\n".join(f"{k}={settings[k]}" for k in sorted(settings))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
