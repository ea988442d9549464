"""Canonical JSON: the single serialization convention for every file this
tool writes.

Canonical form is UTF-8 text with LF-free single-line output, object keys
sorted lexicographically, and no insignificant whitespace, so that equal
values always produce byte-identical files and stable hashes. Floats are
rejected outright: no schema in this project carries them, and excluding
them removes the one source of platform-dependent formatting.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any


class CanonicalError(ValueError):
    """Raised when a value cannot be canonically serialized."""


def _reject_floats(value: Any, path: str = "$") -> None:
    if isinstance(value, float):
        raise CanonicalError(f"float at {path} has no canonical form")
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise CanonicalError(f"non-string key at {path}: {key!r}")
            _reject_floats(item, f"{path}.{key}")
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _reject_floats(item, f"{path}[{i}]")


def dumps(value: Any) -> str:
    """Serialize ``value`` to its canonical JSON string."""
    _reject_floats(value)
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dumps_bytes(value: Any) -> bytes:
    return dumps(value).encode("utf-8")


def loads(text: str | bytes) -> Any:
    return json.loads(text)


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def hash_value(value: Any) -> str:
    """SHA-256 hex digest of a value's canonical serialization."""
    return sha256_hex(dumps_bytes(value))


def write_file(path: str | Path, value: Any) -> bytes:
    """Write the canonical serialization of ``value`` to ``path``.

    Returns the exact bytes written (no trailing newline; the file content
    is the canonical form and nothing else).
    """
    data = dumps_bytes(value)
    Path(path).write_bytes(data)
    return data


def read_file(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))
