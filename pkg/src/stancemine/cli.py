"""Command-line entry point.

``stancemine score`` runs the pipeline from a config file, with flags to
override backend, strategy, k, output format, and worker count for a
single invocation.  ``stancemine cache`` inspects and maintains the
hit-count cache.  Exit codes: 0 for a run that produced at least one
score (warnings included), 1 when every country failed, 2 for
configuration problems.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .cache import CacheFile
from .config import BACKENDS, OUTPUT_FORMATS, load_config, parse_duration
from .errors import ConfigError, StancemineError
from .pipeline import preview, run
from .queries import Strategy
from .report import render

EXIT_OK = 0
EXIT_ALL_FAILED = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stancemine",
        description="Estimate per-country regulatory stance scores from search hit counts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="run the scoring pipeline")
    score.add_argument("--config", required=True, type=Path, help="JSON config file")
    score.add_argument("--backend", choices=BACKENDS, help="override the configured backend")
    score.add_argument(
        "--strategy",
        choices=[s.value for s in Strategy],
        help="override the query formulation strategy",
    )
    score.add_argument("--k", type=int, help="override the number of bands")
    score.add_argument(
        "--format",
        dest="output_format",
        choices=OUTPUT_FORMATS,
        help="override the output format",
    )
    score.add_argument("--workers", type=int, help="override the thread count")
    score.add_argument(
        "--dry-run",
        action="store_true",
        help="print the queries the run would issue and exit",
    )

    cache = sub.add_parser("cache", help="inspect or maintain the hit-count cache")
    cache_sub = cache.add_subparsers(dest="cache_command", required=True)

    stats = cache_sub.add_parser("stats", help="entry counts per backend")
    stats.add_argument("--cache", required=True, type=Path, help="cache file")

    prune = cache_sub.add_parser("prune", help="drop entries older than a TTL")
    prune.add_argument("--cache", required=True, type=Path, help="cache file")
    prune.add_argument("--ttl", required=True, help="max age, e.g. 45s, 10m, 24h, 7d")

    imp = cache_sub.add_parser("import", help="merge another cache file into this one")
    imp.add_argument("source", type=Path, help="cache file to import")
    imp.add_argument("--cache", required=True, type=Path, help="cache file to merge into")

    return parser


def _cmd_score(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.backend:
        overrides["backend"] = args.backend
    if args.strategy:
        overrides["strategy"] = Strategy(args.strategy)
    if args.k is not None:
        overrides["k"] = args.k
    if args.output_format:
        overrides["output_format"] = args.output_format
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        config = replace(config, **overrides)

    if args.dry_run:
        for spec in preview(config):
            print(spec.rendered)
        return EXIT_OK

    result = run(config)
    sys.stdout.write(render(result, config.output_format))
    if config.output_format != "table":
        # The table footer already carries the warnings.
        for warning in result.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    if all(row.status != "ok" for row in result.rows):
        return EXIT_ALL_FAILED
    return EXIT_OK


def _cmd_cache(args: argparse.Namespace) -> int:
    cache = CacheFile(args.cache)
    if args.cache_command == "stats":
        counts = cache.stats()
        for backend in sorted(counts):
            print(f"{backend}: {counts[backend]}")
        print(f"total: {sum(counts.values())}")
        return EXIT_OK
    if args.cache_command == "prune":
        kept, dropped = cache.prune(parse_duration(args.ttl))
        print(f"kept {kept}, dropped {dropped}")
        return EXIT_OK
    if not args.source.exists():
        raise ConfigError(f"no such cache file: {args.source}")
    total, imported = cache.merge_from(args.source)
    print(f"imported {imported} records, {total} entries total")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "score":
            return _cmd_score(args)
        return _cmd_cache(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StancemineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
