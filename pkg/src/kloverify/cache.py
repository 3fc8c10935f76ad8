"""On-disk JSON caches with checksums.

Every document carries a ``checksum`` field: the SHA-256 of its canonical
JSON (sorted keys, no whitespace) with that field removed.  A document whose
checksum does not match is discarded and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .finite_field import make_field
from .kloosterman import FreqTable, freq_table
from .padics import ClosedPoint, closed_points
from .quadratic_forms import ClassNumberCache

__all__ = ["CacheStore", "checksum", "resolve_cache_dir", "ENV_VAR"]

ENV_VAR = "KLOVERIFY_CACHE"


def checksum(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k != "checksum"}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def resolve_cache_dir(explicit: str | os.PathLike | None = None) -> Path | None:
    """The environment variable wins over ``explicit``; None disables caching."""
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(explicit) if explicit else None


@dataclass
class CacheStore:
    root: Path | None
    hits: dict[str, int] = field(default_factory=dict)
    misses: dict[str, int] = field(default_factory=dict)
    corrupt: list[str] = field(default_factory=list)

    def _path(self, kind: str, name: str) -> Path | None:
        return None if self.root is None else self.root / kind / f"{name}.json"

    def load(self, kind: str, name: str) -> dict | None:
        path = self._path(kind, name)
        if path is None or not path.exists():
            return None
        try:
            doc = json.loads(path.read_text())
            ok = isinstance(doc, dict) and doc.get("checksum") == checksum(doc)
        except (json.JSONDecodeError, UnicodeDecodeError):
            ok = False
        if not ok:
            self.corrupt.append(f"{kind}/{name}")
            return None
        return doc

    def store(self, kind: str, name: str, doc: dict) -> None:
        path = self._path(kind, name)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = dict(doc)
        doc["checksum"] = checksum(doc)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True, indent=1))
        tmp.replace(path)

    def _fetch(self, kind: str, name: str, build: Callable[[], dict]) -> dict:
        doc = self.load(kind, name)
        if doc is not None:
            self.hits[kind] = self.hits.get(kind, 0) + 1
            return doc
        self.misses[kind] = self.misses.get(kind, 0) + 1
        doc = build()
        self.store(kind, name, doc)
        return doc

    def freq(self, p: int, m: int, shards: int = 1) -> FreqTable:
        """Enumerated frequency table for F_{p^m}."""
        doc = self._fetch("freq", f"p{p}_m{m}", lambda: freq_table(make_field(p, m), shards).to_json())
        tab = FreqTable.from_json(doc)
        if tuple(tab.modulus) != make_field(p, m).modulus:
            raise ValueError(f"cached table for p={p}, m={m} was built with a different modulus")
        return tab

    def class_numbers(self, Ds: list[int], name: str = "H") -> ClassNumberCache:
        cn = ClassNumberCache()
        doc = self.load("classno", name)
        if doc is not None:
            cn.load_json({D: v for D, v in doc.items() if D != "checksum"})
        have = cn.entries
        missing = [D for D in Ds if D not in have]
        found = len(Ds) - len(missing)
        if found:
            self.hits["classno"] = self.hits.get("classno", 0) + found
        if missing:
            self.misses["classno"] = self.misses.get("classno", 0) + len(missing)
            for D in missing:
                cn.H(D)
            self.store("classno", name, cn.to_json())
        return cn

    def orbits(self, p: int, d: int) -> tuple[ClosedPoint, ...]:
        """Closed points of degree d with their Kloosterman values, keyed by minimal polynomial."""
        def build() -> dict:
            return {"p": p, "d": d, "points": [
                {"key": list(pt.key), "rep": pt.representative, "kl": pt.kl} for pt in closed_points(p, d)]}
        doc = self._fetch("orbits", f"p{p}_d{d}", build)
        return tuple(ClosedPoint(p, d, tuple(r["key"]), r["rep"], r["kl"]) for r in doc["points"])

    def summary(self) -> dict:
        return {"hits": dict(sorted(self.hits.items())), "misses": dict(sorted(self.misses.items())),
                "corrupt": sorted(self.corrupt)}

