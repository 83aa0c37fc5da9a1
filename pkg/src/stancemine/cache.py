"""Append-only JSON-Lines cache of query hit counts.

One record per line:

    {"query": str, "backend": str, "params": {..}, "hits": int,
     "estimated": bool, "retrieved_at": RFC 3339 str}

The last record for a key wins.  Blank lines and lines starting with ``#``
are skipped, so a fixture file can carry a provenance header.  Engine totals
drift over time, which makes this file the reproducibility boundary of a
run: replaying it answers every query without touching the network.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError


def params_key(params: Mapping[str, str]) -> str:
    """Canonical serialization of extra engine parameters for cache keys."""
    return json.dumps(dict(params), sort_keys=True, separators=(",", ":"))


def parse_rfc3339(value: str) -> datetime:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def utc_now_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class CacheRecord:
    query: str
    backend: str
    params: Mapping[str, str]
    hits: int
    estimated: bool
    retrieved_at: str

    def key(self) -> tuple[str, str, str]:
        return (self.backend, self.query, params_key(self.params))

    def replay_key(self) -> tuple[str, str]:
        return (self.query, params_key(self.params))

    def to_json(self) -> str:
        return json.dumps(
            {
                "query": self.query,
                "backend": self.backend,
                "params": dict(self.params),
                "hits": self.hits,
                "estimated": self.estimated,
                "retrieved_at": self.retrieved_at,
            },
            sort_keys=False,
        )


def _record_from_obj(obj: dict, path: Path, lineno: int) -> CacheRecord:
    try:
        hits = obj["hits"]
        if not isinstance(hits, int) or isinstance(hits, bool) or hits < 0:
            raise ValueError(f"hits must be a non-negative integer, got {hits!r}")
        return CacheRecord(
            query=str(obj["query"]),
            backend=str(obj["backend"]),
            params={str(k): str(v) for k, v in obj.get("params", {}).items()},
            hits=hits,
            estimated=bool(obj.get("estimated", False)),
            retrieved_at=str(obj["retrieved_at"]),
        )
    except (KeyError, ValueError, TypeError, AttributeError) as exc:
        raise ConfigError(f"{path}:{lineno}: bad cache record: {exc}") from exc


class CacheFile:
    """Reader/appender for one cache file.

    Appends are serialized through a lock (single writer); reads build an
    immutable snapshot, so concurrent readers never block each other.
    """

    def __init__(self, path: str | os.PathLike) -> None:
        self.path = Path(path)
        self._write_lock = threading.Lock()

    def read_records(self) -> list[CacheRecord]:
        if not self.path.exists():
            return []
        records = []
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read cache file {self.path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{self.path}:{lineno}: invalid JSON: {exc}") from exc
            records.append(_record_from_obj(obj, self.path, lineno))
        return records

    def snapshot(self) -> dict[tuple[str, str], CacheRecord]:
        """Replay view: (query, params) -> latest record, any backend."""
        snap: dict[tuple[str, str], CacheRecord] = {}
        for rec in self.read_records():
            snap[rec.replay_key()] = rec
        return snap

    def append(self, record: CacheRecord) -> None:
        line = record.to_json()
        with self._write_lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def stats(self) -> dict[str, int]:
        """Unique entry count per backend (last record for a key wins)."""
        latest: dict[tuple[str, str, str], CacheRecord] = {}
        for rec in self.read_records():
            latest[rec.key()] = rec
        counts: dict[str, int] = {}
        for key in latest:
            counts[key[0]] = counts.get(key[0], 0) + 1
        return counts

    def _rewrite(self, records: Iterable[CacheRecord]) -> None:
        with self._write_lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for rec in records:
                    fh.write(rec.to_json() + "\n")
            tmp.replace(self.path)

    def prune(self, ttl_seconds: float, now: datetime | None = None) -> tuple[int, int]:
        """Drop entries older than ``ttl_seconds``; returns (kept, dropped).

        Compacts the file to one record per (backend, query, params) key.
        """
        if not self.path.exists():
            return 0, 0
        now = now or datetime.now(timezone.utc)
        latest: dict[tuple[str, str, str], CacheRecord] = {}
        for rec in self.read_records():
            latest[rec.key()] = rec
        kept = []
        dropped = 0
        for rec in latest.values():
            age = (now - parse_rfc3339(rec.retrieved_at)).total_seconds()
            if age <= ttl_seconds:
                kept.append(rec)
            else:
                dropped += 1
        self._rewrite(kept)
        return len(kept), dropped

    def merge_from(self, other: str | os.PathLike) -> tuple[int, int]:
        """Merge another cache file into this one, last-wins by key.

        Imported records override existing ones on key collision; returns
        (total entries after merge, records imported).
        """
        incoming = CacheFile(other).read_records()
        latest: dict[tuple[str, str, str], CacheRecord] = {}
        for rec in self.read_records():
            latest[rec.key()] = rec
        for rec in incoming:
            latest[rec.key()] = rec
        self._rewrite(latest.values())
        return len(latest), len(incoming)
