"""Search-query construction.

Turns the configured lexical sets (country variants, positive/negative cues,
topic constraints) into concrete query strings under one of two formulation
strategies:

* ``collapsed`` -- each set becomes a single parenthesized disjunction, giving
  exactly three queries per country (positive, negative, total).
* ``expanded``  -- one query per (variant x cue x constraint) coordinate, with
  no disjunctive operator anywhere; (|P| + |N| + 1) * |C| * |S| queries.

Rendering is pure and deterministic: identical inputs produce byte-identical
strings, so rendered queries double as cache keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError

RESERVED_CHARS = ("|", "~", '"')


class Role(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    TOTAL = "total"


class Strategy(str, Enum):
    COLLAPSED = "collapsed"
    EXPANDED = "expanded"


@dataclass(frozen=True)
class LexicalEntry:
    """A single- or multi-word search term.

    ``pre_escaped`` entries may carry operator characters verbatim (e.g. a
    cue already written as ``~allows``); everything else is rejected at
    construction so queries never drift semantically between engines.
    """

    text: str
    pre_escaped: bool = False

    def __post_init__(self) -> None:
        if not self.text:
            raise ConfigError("lexical entry must be non-empty")
        if self.text != self.text.strip():
            raise ConfigError(f"lexical entry has leading/trailing whitespace: {self.text!r}")
        if "  " in self.text or "\t" in self.text or "\n" in self.text:
            raise ConfigError(f"lexical entry has non-single internal whitespace: {self.text!r}")
        if not self.pre_escaped:
            for ch in RESERVED_CHARS:
                if ch in self.text:
                    raise ConfigError(
                        f"lexical entry contains reserved operator character {ch!r}: {self.text!r}"
                    )

    @property
    def is_multi_word(self) -> bool:
        return " " in self.text


def _unique_entries(entries: Iterable[LexicalEntry], what: str) -> tuple[LexicalEntry, ...]:
    out = tuple(entries)
    if not out:
        raise ConfigError(f"{what} must contain at least one entry")
    texts = [e.text for e in out]
    if len(set(texts)) != len(texts):
        raise ConfigError(f"{what} contains duplicate entries")
    return out


@dataclass(frozen=True)
class CountryConfig:
    """A country's identifier plus its ordered set of lexical variants."""

    id: str
    variants: tuple[LexicalEntry, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigError("country id must be non-empty")
        object.__setattr__(self, "variants", _unique_entries(self.variants, f"variants of {self.id!r}"))


@dataclass(frozen=True)
class CueConfig:
    """Positive/negative cue sets, topic constraints, and engine capabilities.

    ``synonym_expansion`` prefixes single-word cues with the engine's ``~``
    synonym operator; it is the capability switch for engines that dropped
    the operator.  ``extra_params`` are passed to the engine out-of-band
    (e.g. a topic-biasing parameter) and become part of the cache key.
    """

    positives: tuple[LexicalEntry, ...]
    negatives: tuple[LexicalEntry, ...]
    constraints: tuple[LexicalEntry, ...]
    synonym_expansion: bool = False
    extra_params: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "positives", _unique_entries(self.positives, "positive cues"))
        object.__setattr__(self, "negatives", _unique_entries(self.negatives, "negative cues"))
        object.__setattr__(self, "constraints", _unique_entries(self.constraints, "constraints"))
        overlap = {e.text for e in self.positives} & {e.text for e in self.negatives}
        if overlap:
            raise ConfigError(f"positive and negative cue sets overlap: {sorted(overlap)}")


@dataclass(frozen=True)
class QuerySpec:
    """One rendered query, tagged with its role and the coordinates it covers.

    ``variants``/``cues``/``constraints`` hold the raw configured texts (no
    synonym prefix), so local backends can re-evaluate the query against a
    document without parsing the rendered string.  ``cues`` is empty for
    role=total.
    """

    role: Role
    country_id: str
    rendered: str
    variants: tuple[str, ...]
    cues: tuple[str, ...]
    constraints: tuple[str, ...]

    @property
    def parts(self) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
        return (self.variants, self.cues, self.constraints)


@dataclass(frozen=True)
class QueryBatch:
    country_id: str
    strategy: Strategy
    specs: tuple[QuerySpec, ...]


def _term(entry: LexicalEntry) -> str:
    # Multi-word terms are phrase-quoted; single words stay bare so operators
    # like the synonym prefix keep working.
    return f'"{entry.text}"' if entry.is_multi_word else entry.text


def render_group(entries: Sequence[LexicalEntry]) -> str:
    """Render a set of entries as a parenthesized disjunction.

    Entries are joined with `` | `` in configuration order; a singleton set
    renders as the element itself, still parenthesized.
    """
    if not entries:
        raise ConfigError("cannot render an empty entry group")
    return "(" + " | ".join(_term(e) for e in entries) + ")"


def _apply_synonym(entry: LexicalEntry, synonym_expansion: bool) -> LexicalEntry:
    # The synonym operator only composes with bare single words; quoted
    # phrases and pre-escaped entries pass through unchanged.
    if synonym_expansion and not entry.pre_escaped and not entry.is_multi_word:
        return LexicalEntry("~" + entry.text, pre_escaped=True)
    return entry


def build_collapsed(country: CountryConfig, cues: CueConfig) -> QueryBatch:
    """Build the three collapsed queries for one country.

    positive = (C) (P) (S), negative = (C) (N) (S), total = (C) (S); the
    space between fragments is the engines' implicit conjunction.
    """
    positives = [_apply_synonym(e, cues.synonym_expansion) for e in cues.positives]
    negatives = [_apply_synonym(e, cues.synonym_expansion) for e in cues.negatives]
    c_frag = render_group(country.variants)
    s_frag = render_group(cues.constraints)
    variant_texts = tuple(e.text for e in country.variants)
    constraint_texts = tuple(e.text for e in cues.constraints)

    def spec(role: Role, cue_frag: str | None, cue_texts: tuple[str, ...]) -> QuerySpec:
        fragments = [c_frag] + ([cue_frag] if cue_frag else []) + [s_frag]
        return QuerySpec(
            role=role,
            country_id=country.id,
            rendered=" ".join(fragments),
            variants=variant_texts,
            cues=cue_texts,
            constraints=constraint_texts,
        )

    specs = (
        spec(Role.POSITIVE, render_group(positives), tuple(e.text for e in cues.positives)),
        spec(Role.NEGATIVE, render_group(negatives), tuple(e.text for e in cues.negatives)),
        spec(Role.TOTAL, None, ()),
    )
    return QueryBatch(country_id=country.id, strategy=Strategy.COLLAPSED, specs=specs)


def build_expanded(country: CountryConfig, cues: CueConfig) -> QueryBatch:
    """Build one query per (variant x cue x constraint) coordinate.

    Each query is a plain conjunction of two or three terms with no
    disjunctive operator anywhere: full semantic control at cubic cost.
    """
    specs: list[QuerySpec] = []

    def add(role: Role, variant: LexicalEntry, cue: LexicalEntry | None, constraint: LexicalEntry) -> None:
        terms = [variant] + ([_apply_synonym(cue, cues.synonym_expansion)] if cue else []) + [constraint]
        specs.append(
            QuerySpec(
                role=role,
                country_id=country.id,
                rendered=" ".join(_term(t) for t in terms),
                variants=(variant.text,),
                cues=(cue.text,) if cue else (),
                constraints=(constraint.text,),
            )
        )

    for role, cue_set in ((Role.POSITIVE, cues.positives), (Role.NEGATIVE, cues.negatives)):
        for variant in country.variants:
            for cue in cue_set:
                for constraint in cues.constraints:
                    add(role, variant, cue, constraint)
    for variant in country.variants:
        for constraint in cues.constraints:
            add(Role.TOTAL, variant, None, constraint)

    return QueryBatch(country_id=country.id, strategy=Strategy.EXPANDED, specs=tuple(specs))


def build_batch(strategy: Strategy, country: CountryConfig, cues: CueConfig) -> QueryBatch:
    if strategy is Strategy.COLLAPSED:
        return build_collapsed(country, cues)
    return build_expanded(country, cues)


def query_complexity(strategy: Strategy, p: int, n: int, c: int, s: int) -> int:
    """Number of queries one country costs under ``strategy``.

    Collapsed cost is the constant 3; expanded cost is (p + n + 1) * c * s.
    """
    for name, size in (("p", p), ("n", n), ("c", c), ("s", s)):
        if size < 1:
            raise ConfigError(f"set size |{name.upper()}| must be >= 1, got {size}")
    if strategy is Strategy.COLLAPSED:
        return 3
    return (p + n + 1) * c * s
