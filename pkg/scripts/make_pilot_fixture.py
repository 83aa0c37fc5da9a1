#!/usr/bin/env python3
"""Regenerate fixtures/pilot: a self-contained replay run.

The fixture bundles a 15-country config, a recorded-cache file, and a
reference table of the factor values the replay run must reproduce.
Counts are synthetic: for each country a fixed positive count P is
paired with a searched (n, t) so that contrast and weight round to the
reference values at three decimals and their product stays within 0.001
of the reference score.  The script then replays the fixture through the
installed package and refuses to write a fixture that does not reproduce
the table, the band memberships, or the score ranking.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from stancemine.cache import CacheRecord
from stancemine.config import load_config
from stancemine.pipeline import run
from stancemine.queries import build_batch

PILOT_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "pilot"

P = 1_000_000
RETRIEVED_AT = "2025-01-01T00:00:00+00:00"

# country, contrast, weight, score, band at three decimals
REFERENCE = [
    ("Algeria", 0.114, 0.305, 0.035, "low"),
    ("China", 0.673, 0.300, 0.202, "high"),
    ("Cyprus", 0.277, 0.334, 0.093, "mid"),
    ("Egypt", 0.313, 0.198, 0.062, "low"),
    ("France", 0.720, 0.180, 0.130, "mid"),
    ("Gibraltar", 0.544, 0.598, 0.325, "high"),
    ("Greece", 0.487, 0.225, 0.110, "mid"),
    ("Hong Kong", 0.497, 0.264, 0.131, "mid"),
    ("Malta", 0.386, 0.255, 0.098, "mid"),
    ("Morocco", 0.211, 0.216, 0.046, "low"),
    ("Nepal", 0.127, 0.247, 0.031, "low"),
    ("Singapore", 0.590, 0.212, 0.125, "mid"),
    ("South Africa", 0.496, 0.179, 0.089, "mid"),
    ("Switzerland", 0.637, 0.166, 0.106, "mid"),
    ("Taiwan", 0.326, 0.335, 0.109, "mid"),
]

CENTROIDS = (0.264, 0.110, 0.044)

CONFIG = {
    "countries": [name for name, *_ in REFERENCE],
    "cues": {
        "positive": ["allows"],
        "negative": ["bans"],
        "synonym_expansion": True,
    },
    "constraints": ["cryptocurrencies", "bitcoin"],
    "engine_params": {"hq": "central bank security exchange commission"},
    "strategy": "collapsed",
    "backend": "replay",
    "k": 3,
    "cache_path": "cache.jsonl",
    "language": "en",
    "output_format": "table",
}

HEADER = """\
# Pilot hit-count fixture for the bundled example configuration.
# Generated by scripts/make_pilot_fixture.py.  Counts are synthetic,
# chosen so the replayed factors round to the table in reference.json.
"""


def solve_counts(contrast: float, weight: float, score: float) -> tuple[int, int]:
    """Find (n, t) so the derived factors round to the targets.

    Keeps p fixed at P and scans n near the value implied by the
    contrast, then picks the t whose weight rounds correctly and whose
    factor product lies closest to the target score.
    """
    n_center = P - round(contrast * P)
    best: tuple[float, int, int] | None = None
    for n in range(max(0, n_center - 600), n_center + 601):
        if n >= P:
            continue
        c = (P - n) / P
        if round(c, 3) != contrast:
            continue
        w_target = min(max(score / c, weight - 0.00049), weight + 0.00049)
        t_center = round((P + n) / w_target)
        for t in (t_center - 1, t_center, t_center + 1):
            if t <= P + n:
                continue
            w = (P + n) / t
            if round(w, 3) != weight:
                continue
            err = abs(c * w - score)
            if best is None or err < best[0]:
                best = (err, n, t)
    if best is None:
        raise SystemExit(f"no feasible counts for contrast={contrast} weight={weight}")
    return best[1], best[2]


def write_fixture() -> None:
    PILOT_DIR.mkdir(parents=True, exist_ok=True)
    (PILOT_DIR / "config.json").write_text(
        json.dumps(CONFIG, indent=2) + "\n", encoding="utf-8"
    )

    config = load_config(PILOT_DIR / "config.json")
    params = config.engine_params()
    by_id = {c.id: c for c in config.countries}

    lines = [HEADER.rstrip("\n")]
    reference_countries = {}
    for name, contrast, weight, score, band in REFERENCE:
        n, t = solve_counts(contrast, weight, score)
        batch = build_batch(config.strategy, by_id[name], config.cues)
        hits_by_role = {"positive": P, "negative": n, "total": t}
        for spec in batch.specs:
            record = CacheRecord(
                query=spec.rendered,
                backend="google_cse",
                params=params,
                hits=hits_by_role[spec.role.value],
                estimated=True,
                retrieved_at=RETRIEVED_AT,
            )
            lines.append(record.to_json())
        reference_countries[name] = {
            "contrast": contrast,
            "weight": weight,
            "r": score,
            "band": band,
        }
    (PILOT_DIR / "cache.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    reference = {
        "tolerance": {"factors": "3 decimals", "r": 0.001, "centroids": 0.001},
        "centroids": list(CENTROIDS),
        "countries": reference_countries,
    }
    (PILOT_DIR / "reference.json").write_text(
        json.dumps(reference, indent=2) + "\n", encoding="utf-8"
    )


def verify_fixture() -> None:
    config = load_config(PILOT_DIR / "config.json")
    result = run(config)
    rows = {row.country_id: row for row in result.rows}
    for name, contrast, weight, score, band in REFERENCE:
        row = rows[name]
        problems = []
        if round(row.contrast, 3) != contrast:
            problems.append(f"contrast {row.contrast:.6f} !~ {contrast}")
        if round(row.weight, 3) != weight:
            problems.append(f"weight {row.weight:.6f} !~ {weight}")
        if abs(row.r - score) > 0.001:
            problems.append(f"r {row.r:.6f} off target {score}")
        if row.band != band:
            problems.append(f"band {row.band} != {band}")
        if problems:
            raise SystemExit(f"{name}: " + "; ".join(problems))
    ranking = [row.country_id for row in result.rows]
    if ranking[:4] != ["Gibraltar", "China", "Hong Kong", "France"]:
        raise SystemExit(f"unexpected score ranking: {ranking[:4]}")
    top_contrast = max(result.rows, key=lambda row: row.contrast)
    if top_contrast.country_id != "France":
        raise SystemExit(f"unexpected contrast leader: {top_contrast.country_id}")
    for got, want in zip(result.clustering.centroids, CENTROIDS):
        if abs(got - want) > 0.001:
            raise SystemExit(f"centroid {got:.6f} off target {want}")
    print(f"fixture ok: {len(REFERENCE)} countries, {result.meta['queries_total']} queries")


def main() -> int:
    write_fixture()
    verify_fixture()
    return 0


if __name__ == "__main__":
    sys.exit(main())
