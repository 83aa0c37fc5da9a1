"""Hit-count providers: resolve a query to a document count.

Three interchangeable sources:

* ``CorpusProvider`` counts matching documents in a local text corpus by
  brute-force scanning.  Counts are exact (``estimated=False``).
* ``ReplayProvider`` answers from a previously recorded cache file and
  never touches the network.
* ``LiveProvider`` asks a JSON search API for its reported total and
  records every answer into the cache.  Engine totals are approximations,
  so these counts carry ``estimated=True``.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import requests

from .cache import CacheFile, CacheRecord, params_key, parse_rfc3339, utc_now_rfc3339
from .errors import (
    CacheMissError,
    ConfigError,
    MalformedResponseError,
    QuotaExhaustedError,
    TransportError,
)
from .queries import QuerySpec

DEFAULT_API_URL = "https://www.googleapis.com/customsearch/v1"

ENV_API_KEY = "STANCEMINE_API_KEY"
ENV_ENGINE_ID = "STANCEMINE_ENGINE_ID"
ENV_API_URL = "STANCEMINE_API_URL"


@dataclass(frozen=True)
class HitCount:
    """Resolved count for one query, tagged with its provenance."""

    query: str
    hits: int
    backend_id: str
    retrieved_at: str | None
    estimated: bool

    def __post_init__(self) -> None:
        if self.hits < 0:
            raise ValueError("hits must be non-negative")


class RateLimiter:
    """Enforces a minimum interval between acquisitions across threads."""

    def __init__(
        self,
        rate_per_second: float,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self._interval = 1.0 / rate_per_second if rate_per_second > 0 else 0.0
        self._sleep = sleep
        self._clock = clock
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        if self._interval <= 0:
            return
        with self._lock:
            now = self._clock()
            wait = self._next_at - now
            if wait > 0:
                self._sleep(wait)
                now = self._next_at
            self._next_at = max(now, self._next_at) + self._interval


def tokenize(text: str) -> list[str]:
    return re.findall(r"\w+", text.lower())


@dataclass(frozen=True)
class CorpusDocument:
    doc_id: str
    text: str
    tokens: tuple[str, ...] = field(init=False, repr=False)
    token_set: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        toks = tuple(tokenize(self.text))
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "token_set", frozenset(toks))


def _contains_phrase(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    m = len(phrase)
    for i in range(len(tokens) - m + 1):
        if tuple(tokens[i : i + m]) == tuple(phrase):
            return True
    return False


def _term_matches(doc: CorpusDocument, term: str) -> bool:
    if term.startswith("~"):
        term = term[1:]
    toks = tokenize(term)
    if not toks:
        return False
    if len(toks) == 1:
        return toks[0] in doc.token_set
    return _contains_phrase(doc.tokens, toks)


def corpus_match(doc: CorpusDocument, spec: QuerySpec) -> bool:
    """Whether a document satisfies the query's conjunction of groups.

    Each non-empty group (name variants, cues, topic constraints) must be
    satisfied by at least one of its terms; a single-token term matches on
    token membership, a multi-token term on a contiguous token run.
    """
    for group in spec.parts:
        if group and not any(_term_matches(doc, term) for term in group):
            return False
    return True


class CorpusProvider:
    """Exact counts over an in-memory document collection."""

    backend_id = "corpus"

    def __init__(self, documents: Sequence[CorpusDocument]) -> None:
        self.documents = tuple(documents)

    @classmethod
    def from_directory(cls, root: str | Path) -> "CorpusProvider":
        root = Path(root)
        if not root.is_dir():
            raise ConfigError(f"corpus path is not a directory: {root}")
        docs = []
        for path in sorted(p for p in root.rglob("*") if p.is_file()):
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise ConfigError(f"cannot read corpus file {path}: {exc}") from exc
            docs.append(CorpusDocument(doc_id=str(path.relative_to(root)), text=text))
        return cls(docs)

    def lookup(self, spec: QuerySpec) -> HitCount:
        hits = sum(1 for doc in self.documents if corpus_match(doc, spec))
        return HitCount(
            query=spec.rendered,
            hits=hits,
            backend_id=self.backend_id,
            retrieved_at=None,
            estimated=False,
        )


class ReplayProvider:
    """Answers solely from recorded cache entries; misses are errors."""

    backend_id = "replay"

    def __init__(
        self,
        snapshot: Mapping[tuple[str, str], CacheRecord],
        params: Mapping[str, str] | None = None,
    ) -> None:
        self._snapshot = dict(snapshot)
        self._params_key = params_key(params or {})

    @classmethod
    def from_cache_file(
        cls, path: str | Path, params: Mapping[str, str] | None = None
    ) -> "ReplayProvider":
        return cls(CacheFile(path).snapshot(), params)

    def lookup(self, spec: QuerySpec) -> HitCount:
        record = self._snapshot.get((spec.rendered, self._params_key))
        if record is None:
            raise CacheMissError(f"no recorded answer for query: {spec.rendered}")
        return HitCount(
            query=spec.rendered,
            hits=record.hits,
            backend_id=record.backend,
            retrieved_at=record.retrieved_at,
            estimated=record.estimated,
        )


class LiveProvider:
    """Fetches totals from a JSON search API with caching and backoff.

    Each successful fetch appends exactly one cache record.  A cached
    answer within ``cache_ttl`` seconds (or any age when ``cache_ttl`` is
    None) is returned without a request.  HTTP 429 triggers exponential
    backoff; after ``max_attempts`` rejections the run aborts with
    ``QuotaExhaustedError``.
    """

    backend_id = "google_cse"

    def __init__(
        self,
        api_key: str,
        engine_id: str,
        *,
        base_url: str = DEFAULT_API_URL,
        params: Mapping[str, str] | None = None,
        cache: CacheFile | None = None,
        cache_ttl: float | None = None,
        rate_limiter: RateLimiter | None = None,
        sleep: Callable[[float], None] = time.sleep,
        session: requests.Session | None = None,
        timeout: float = 30.0,
        max_attempts: int = 5,
        backoff_base: float = 1.0,
    ) -> None:
        if not api_key or not engine_id:
            raise ConfigError("api_key and engine_id must be non-empty")
        self._api_key = api_key
        self._engine_id = engine_id
        self._base_url = base_url
        self._params = dict(params or {})
        self._cache = cache
        self._cache_ttl = cache_ttl
        self._rate_limiter = rate_limiter
        self._sleep = sleep
        self._session = session or requests.Session()
        self._timeout = timeout
        self._max_attempts = max_attempts
        self._backoff_base = backoff_base
        self._lock = threading.Lock()
        self._snapshot: dict[tuple[str, str], CacheRecord] = (
            cache.snapshot() if cache is not None else {}
        )
        self._quota_exhausted = False
        self.fetched = 0
        self.from_cache = 0

    @classmethod
    def from_env(cls, environ: Mapping[str, str], **kwargs) -> "LiveProvider":
        api_key = environ.get(ENV_API_KEY, "")
        engine_id = environ.get(ENV_ENGINE_ID, "")
        if not api_key:
            raise ConfigError(f"{ENV_API_KEY} is not set")
        if not engine_id:
            raise ConfigError(f"{ENV_ENGINE_ID} is not set")
        base_url = environ.get(ENV_API_URL) or DEFAULT_API_URL
        return cls(api_key, engine_id, base_url=base_url, **kwargs)

    def _cached(self, key: tuple[str, str]) -> CacheRecord | None:
        with self._lock:
            record = self._snapshot.get(key)
        if record is None:
            return None
        if self._cache_ttl is not None:
            age = (
                parse_rfc3339(utc_now_rfc3339()) - parse_rfc3339(record.retrieved_at)
            ).total_seconds()
            if age > self._cache_ttl:
                return None
        return record

    def _request_once(self, query: str) -> requests.Response:
        if self._rate_limiter is not None:
            self._rate_limiter.acquire()
        request_params = {"key": self._api_key, "cx": self._engine_id, "q": query}
        request_params.update(self._params)
        try:
            return self._session.get(
                self._base_url, params=request_params, timeout=self._timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc

    def _parse_total(self, response: requests.Response) -> int:
        try:
            payload = response.json()
        except ValueError as exc:
            raise MalformedResponseError(f"response is not JSON: {exc}") from exc
        try:
            total = payload["searchInformation"]["totalResults"]
        except (KeyError, TypeError) as exc:
            raise MalformedResponseError(
                "response lacks searchInformation.totalResults"
            ) from exc
        try:
            hits = int(total)
        except (ValueError, TypeError) as exc:
            raise MalformedResponseError(f"totalResults is not numeric: {total!r}") from exc
        if hits < 0:
            raise MalformedResponseError(f"totalResults is negative: {hits}")
        return hits

    def _fetch(self, query: str) -> int:
        for attempt in range(1, self._max_attempts + 1):
            response = self._request_once(query)
            if response.status_code == 429:
                self._sleep(self._backoff_base * 2 ** (attempt - 1))
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"engine returned HTTP {response.status_code} for query: {query}"
                )
            return self._parse_total(response)
        # Later lookups fail fast instead of re-sleeping the whole schedule.
        with self._lock:
            self._quota_exhausted = True
        raise QuotaExhaustedError(
            f"rate limited on all {self._max_attempts} attempts for query: {query}"
        )

    def lookup(self, spec: QuerySpec) -> HitCount:
        key = (spec.rendered, params_key(self._params))
        record = self._cached(key)
        with self._lock:
            if record is None and self._quota_exhausted:
                raise QuotaExhaustedError(
                    "quota already exhausted earlier in this run"
                )
        if record is not None:
            with self._lock:
                self.from_cache += 1
            return HitCount(
                query=spec.rendered,
                hits=record.hits,
                backend_id=record.backend,
                retrieved_at=record.retrieved_at,
                estimated=record.estimated,
            )
        hits = self._fetch(spec.rendered)
        retrieved_at = utc_now_rfc3339()
        new_record = CacheRecord(
            query=spec.rendered,
            backend=self.backend_id,
            params=dict(self._params),
            hits=hits,
            estimated=True,
            retrieved_at=retrieved_at,
        )
        if self._cache is not None:
            self._cache.append(new_record)
        with self._lock:
            self._snapshot[key] = new_record
            self.fetched += 1
        return HitCount(
            query=spec.rendered,
            hits=hits,
            backend_id=self.backend_id,
            retrieved_at=retrieved_at,
            estimated=True,
        )
