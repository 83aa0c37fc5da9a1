"""End-to-end run: build queries, resolve counts, score, band, report.

Countries are independent, so they are resolved on a thread pool; one
country's failure becomes a note on its row and a run warning, never an
abort.  Scores that did come through are then clustered into bands.
With the replay backend a run is a pure function of config plus cache
file, so repeated runs emit identical reports.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Mapping

from .cache import CacheFile, utc_now_rfc3339
from .clustering import ClusterResult, band_labels, kmeans_1d
from .config import RunConfig
from .errors import ClusteringError, ConfigError
from .providers import (
    CorpusProvider,
    HitCount,
    LiveProvider,
    RateLimiter,
    ReplayProvider,
)
from .queries import QueryBatch, QuerySpec, build_batch
from .report import ReportRow, RunResult, sort_rows
from .scoring import CountTriple, ScoreStatus, StanceScore, aggregate, score

DEFAULT_MAX_WORKERS = 8


def build_provider(config: RunConfig, environ: Mapping[str, str] | None = None):
    params = config.engine_params()
    if config.backend == "corpus":
        return CorpusProvider.from_directory(config.corpus_path)
    if config.backend == "replay":
        return ReplayProvider.from_cache_file(config.cache_path, params=params)
    if config.backend == "live":
        cache = CacheFile(config.cache_path) if config.cache_path else None
        return LiveProvider.from_env(
            os.environ if environ is None else environ,
            params=params,
            cache=cache,
            cache_ttl=config.cache_ttl,
            rate_limiter=RateLimiter(config.rate_limit),
        )
    raise ConfigError(f"unknown backend: {config.backend!r}")


def preview(config: RunConfig) -> list[QuerySpec]:
    """The queries a run would issue, in order, without issuing any."""
    specs: list[QuerySpec] = []
    for country in config.countries:
        specs.extend(build_batch(config.strategy, country, config.cues).specs)
    return specs


def _resolve_batch(provider, batch: QueryBatch) -> tuple[CountTriple, StanceScore]:
    counts: list[HitCount] = [provider.lookup(spec) for spec in batch.specs]
    triple = aggregate(batch, counts)
    return triple, score(triple)


def run(config: RunConfig, environ: Mapping[str, str] | None = None, provider=None) -> RunResult:
    started_at = utc_now_rfc3339()
    if provider is None:
        provider = build_provider(config, environ)

    batches = [build_batch(config.strategy, c, config.cues) for c in config.countries]
    queries_total = sum(len(b.specs) for b in batches)
    workers = config.workers or max(1, min(len(batches), DEFAULT_MAX_WORKERS))

    outcomes: dict[str, tuple[CountTriple, StanceScore] | Exception] = {}

    def resolve(batch: QueryBatch):
        try:
            return batch.country_id, _resolve_batch(provider, batch)
        except Exception as exc:
            return batch.country_id, exc

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for country_id, outcome in pool.map(resolve, batches):
            outcomes[country_id] = outcome

    warnings: list[str] = []
    rows: list[ReportRow] = []
    scores: dict[str, float] = {}
    resolved_queries = 0
    for batch in batches:
        outcome = outcomes[batch.country_id]
        if isinstance(outcome, Exception):
            warnings.append(f"{batch.country_id} failed: {outcome}")
            rows.append(
                ReportRow(
                    country_id=batch.country_id,
                    p=None,
                    n=None,
                    t=None,
                    contrast=None,
                    weight=None,
                    r=None,
                    status=ScoreStatus.INSUFFICIENT_DATA.value,
                    note=str(outcome),
                )
            )
            continue
        triple, stance = outcome
        resolved_queries += len(batch.specs)
        if stance.status is ScoreStatus.OK:
            scores[stance.country_id] = stance.r
        rows.append(
            ReportRow(
                country_id=stance.country_id,
                p=triple.p,
                n=triple.n,
                t=triple.t,
                contrast=stance.contrast,
                weight=stance.weight,
                r=stance.r,
                status=stance.status.value,
                flags=tuple(sorted(stance.flags)),
                note="no pages matched" if stance.status is not ScoreStatus.OK else None,
            )
        )

    clustering: ClusterResult | None = None
    if scores:
        try:
            clustering = kmeans_1d(scores, config.k)
        except ClusteringError as exc:
            warnings.append(f"clustering skipped: {exc}")
    if clustering is not None:
        labels = band_labels(config.k)
        rows = [
            row
            if row.country_id not in clustering.assignments
            else replace(row, band=labels[clustering.assignments[row.country_id]])
            for row in rows
        ]

    if config.backend == "replay":
        from_cache = resolved_queries
    elif config.backend == "live":
        from_cache = provider.from_cache
    else:
        from_cache = 0

    meta = {
        "strategy": config.strategy.value,
        "backend": config.backend,
        "k": config.k,
        "language": config.language,
        "countries": len(config.countries),
        "queries_total": queries_total,
        "queries_from_cache": from_cache,
        "workers": workers,
        "started_at": started_at,
        "finished_at": utc_now_rfc3339(),
    }
    return RunResult(
        rows=sort_rows(rows),
        clustering=clustering,
        warnings=tuple(warnings),
        meta=meta,
    )
