"""Content-addressed on-disk cache for computed result documents."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .serialize import dumps, to_plain

log = logging.getLogger(__name__)

ENV_VAR = "SPINLAB_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "spinlab"


def cache_key(command: str, params: dict[str, Any]) -> str:
    """sha256 of the package version, command and canonical parameter JSON."""
    canonical = json.dumps(
        {"version": __version__, "command": command, "params": to_plain(params)},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode()).hexdigest()


class ResultCache:
    """Stores one JSON payload per key under ``root/<key[:2]>/<key>.json``."""

    def __init__(self, root: Path | str | None = None, enabled: bool = True) -> None:
        self.root = Path(root) if root is not None else default_cache_dir()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def path_for(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def lookup(self, key: str) -> Any | None:
        if not self.enabled:
            return None
        path = self.path_for(key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            doc = json.loads(path.read_text())
            if doc.get("key") != key or "payload" not in doc:
                raise ValueError("key mismatch")
        except (OSError, ValueError) as exc:
            log.warning("ignoring corrupt cache entry %s (%s)", path, exc)
            self.misses += 1
            return None
        self.hits += 1
        return doc["payload"]

    def store(self, key: str, payload: Any) -> None:
        if not self.enabled:
            return
        path = self.path_for(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(dumps({"key": key, "payload": payload}))
        os.replace(tmp, path)

    def get_or_compute(self, command: str, params: dict[str, Any], compute: Callable[[], Any]) -> Any:
        key = cache_key(command, params)
        hit = self.lookup(key)
        if hit is not None:
            return hit
        # Round-trip through the serializer so hits and misses look identical.
        payload = json.loads(dumps(compute()))
        self.store(key, payload)
        return payload
