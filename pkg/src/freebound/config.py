"""``key = value`` configuration files and the parallelism setting."""

from __future__ import annotations

import os

WORKERS_ENV = "FREEBOUND_WORKERS"


class ConfigError(ValueError):
    pass


def _coerce(text):
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_config(text, source="<config>"):
    """Parse ``key = value`` lines; ``#`` starts a comment.  Keys are
    normalized to snake_case; values become bool, int, float or str."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{n}: empty key")
        out[key.replace("-", "_").lower()] = _coerce(value)
    return out


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def resolve_workers(config_value=None):
    """Parallelism width: environment variable, then config, then 1."""
    env = os.environ.get(WORKERS_ENV)
    value = env if env not in (None, "") else config_value
    if value in (None, ""):
        return 1
    try:
        w = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parallelism width must be an integer, got {value!r}") from None
    if w < 1:
        raise ConfigError(f"parallelism width must be >= 1, got {w}")
    return w
