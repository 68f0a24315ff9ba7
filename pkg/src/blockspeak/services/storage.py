"""Crash-safe little file stores: one JSON document per entity, written
atomically via temp-file rename."""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path

NAME_RE = re.compile(r"[A-Za-z0-9_-]{1,64}\Z")


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_json(path: Path, obj) -> None:
    atomic_write_bytes(path, json.dumps(obj, indent=2).encode("utf-8"))


class JsonDirStore:
    """Named JSON documents in one directory (`{name}.json`)."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str) -> Path:
        if not NAME_RE.match(name):
            raise ValueError(f"invalid name {name!r}")
        return self.directory / f"{name}.json"

    def names(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def exists(self, name: str) -> bool:
        return self._path(name).exists()

    def load(self, name: str):
        path = self._path(name)
        if not path.exists():
            return None
        return json.loads(path.read_text("utf-8"))

    def save(self, name: str, obj) -> None:
        atomic_write_json(self._path(name), obj)

    def delete(self, name: str) -> bool:
        path = self._path(name)
        if not path.exists():
            return False
        path.unlink()
        return True
