"""Run settings and the flat key=value config file reader."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

from .errors import DomainError

DEFAULT_CALIBRATION = "calibration.txt"


def parse_kv(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


@dataclass(frozen=True)
class Settings:
    p0: int = 10**6
    table_limit: int = 1 << 20
    calibration: str = ""

    @classmethod
    def from_file(cls, path: str | Path | None) -> "Settings":
        s = cls()
        if path is None:
            return s
        kv = parse_kv(Path(path).read_text())
        known = {f.name: f.type for f in fields(cls)}
        updates = {}
        for k, v in kv.items():
            if k not in known:
                raise DomainError(f"unknown config key {k!r}")
            updates[k] = v if k == "calibration" else int(float(v))
        return replace(s, **updates)

    def calibration_path(self) -> Path:
        if self.calibration:
            return Path(self.calibration)
        return Path(str(resources.files("hlmoments") / "data" / DEFAULT_CALIBRATION))


def file_sha256(path: Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except FileNotFoundError:
        return ""
