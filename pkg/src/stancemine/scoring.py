"""Turns per-country hit counts into a bounded stance score.

A country's counts are a triple (p, n, t): pages matching the permissive
cues, pages matching the restrictive cues, and pages mentioning the
country and topic at all.  The score is the product of two factors:

* contrast, (p - n) / max(p, n), the direction and strength of the
  leaning, in [-1, 1];
* weight, min(1, (p + n) / t), the share of topical pages that take any
  regulatory angle, in (0, 1].

Multiplying them damps loud-but-thin signals: a country whose coverage
rarely discusses regulation scores near zero regardless of direction.

Counts coming from engine estimates or summed subqueries are marked with
flags rather than rejected; the flags travel with the score so reports
can qualify it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import AggregationError, InsufficientDataError
from .providers import HitCount
from .queries import QueryBatch, Role

FLAG_T_ADJUSTED = "t_adjusted"
FLAG_OVERLAP_APPROX = "overlap_approx"
FLAG_ESTIMATED = "estimated"


class ScoreStatus(str, Enum):
    OK = "ok"
    INSUFFICIENT_DATA = "insufficient_data"


@dataclass(frozen=True)
class CountTriple:
    """Aggregated counts for one country, with data-quality flags."""

    country_id: str
    p: int
    n: int
    t: int
    flags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if min(self.p, self.n, self.t) < 0:
            raise ValueError("counts must be non-negative")


@dataclass(frozen=True)
class StanceScore:
    """Final per-country result; factors are None when data was absent."""

    country_id: str
    contrast: float | None
    weight: float | None
    r: float | None
    status: ScoreStatus
    flags: frozenset[str] = frozenset()


def contrast_factor(p: int, n: int) -> float:
    """Signed leaning (p - n) / max(p, n); undefined when both are zero."""
    if p == 0 and n == 0:
        raise InsufficientDataError("contrast is undefined for p = n = 0")
    return (p - n) / max(p, n)


def weight_factor(p: int, n: int, t: int) -> float:
    """Regulatory salience min(1, (p + n) / t)."""
    if t <= 0:
        raise InsufficientDataError("weight requires a positive total count")
    return min(1.0, (p + n) / t)


def aggregate(batch: QueryBatch, counts: Iterable[HitCount]) -> CountTriple:
    """Collapse a batch's resolved counts into one (p, n, t) triple.

    Counts are matched to the batch's queries by their rendered string;
    a missing or duplicated query is an ``AggregationError``.  Under the
    expanded strategy each role sums its subquery counts, which can count
    a page more than once; any such sum is flagged ``overlap_approx``.
    A reported t below max(p, n) is contradictory (the engine undercounts
    the broader query), and is repaired to p + n and flagged
    ``t_adjusted``.
    """
    by_query: dict[str, HitCount] = {}
    for count in counts:
        if count.query in by_query:
            raise AggregationError(f"duplicate count for query: {count.query}")
        by_query[count.query] = count

    sums = {Role.POSITIVE: 0, Role.NEGATIVE: 0, Role.TOTAL: 0}
    cells = {Role.POSITIVE: 0, Role.NEGATIVE: 0, Role.TOTAL: 0}
    flags: set[str] = set()
    for spec in batch.specs:
        count = by_query.get(spec.rendered)
        if count is None:
            raise AggregationError(
                f"no count for query of {batch.country_id}: {spec.rendered}"
            )
        sums[spec.role] += count.hits
        cells[spec.role] += 1
        if count.estimated:
            flags.add(FLAG_ESTIMATED)

    if any(cells[role] == 0 for role in Role):
        missing = [role.value for role in Role if cells[role] == 0]
        raise AggregationError(
            f"batch for {batch.country_id} has no {', '.join(missing)} query"
        )
    if any(cells[role] > 1 for role in Role):
        flags.add(FLAG_OVERLAP_APPROX)

    p, n, t = sums[Role.POSITIVE], sums[Role.NEGATIVE], sums[Role.TOTAL]
    if t < max(p, n):
        t = p + n
        flags.add(FLAG_T_ADJUSTED)
    return CountTriple(
        country_id=batch.country_id, p=p, n=n, t=t, flags=frozenset(flags)
    )


def score(triple: CountTriple) -> StanceScore:
    """Score one country's counts; zero evidence yields a non-score.

    With p = n = 0 there is no basis for a direction, so the result is
    ``insufficient_data`` rather than a zero score, which would be
    indistinguishable from measured neutrality.  When p + n exceeds t the
    weight saturates at 1 and the score is flagged ``overlap_approx``.
    """
    flags = set(triple.flags)
    if triple.p == 0 and triple.n == 0:
        return StanceScore(
            country_id=triple.country_id,
            contrast=None,
            weight=None,
            r=None,
            status=ScoreStatus.INSUFFICIENT_DATA,
            flags=frozenset(flags),
        )
    t = triple.t
    if t < max(triple.p, triple.n):
        t = triple.p + triple.n
        flags.add(FLAG_T_ADJUSTED)
    if triple.p + triple.n > t:
        flags.add(FLAG_OVERLAP_APPROX)
    contrast = contrast_factor(triple.p, triple.n)
    weight = weight_factor(triple.p, triple.n, t)
    return StanceScore(
        country_id=triple.country_id,
        contrast=contrast,
        weight=weight,
        r=contrast * weight,
        status=ScoreStatus.OK,
        flags=frozenset(flags),
    )
