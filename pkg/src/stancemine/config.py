"""Run configuration: a validated view of one JSON config file.

The file names the countries, cue sets, topic constraints, and the
run-level knobs (strategy, backend, clustering k, output format).
Relative paths inside the file resolve against the file's own directory,
so a config can travel with its cache or corpus.  Credentials are never
read from here; the live backend takes them from the environment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .queries import CountryConfig, CueConfig, LexicalEntry, Strategy

BACKENDS = ("live", "replay", "corpus")
OUTPUT_FORMATS = ("table", "json", "csv")

_DURATION_UNITS = {"s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0}


def parse_duration(value: Any) -> float:
    """Seconds from '45s' / '10m' / '24h' / '7d' or a bare number."""
    if isinstance(value, bool):
        raise ConfigError(f"not a duration: {value!r}")
    if isinstance(value, (int, float)):
        seconds = float(value)
    else:
        match = re.fullmatch(r"\s*(\d+(?:\.\d+)?)([smhd]?)\s*", str(value))
        if not match:
            raise ConfigError(f"not a duration: {value!r}")
        seconds = float(match.group(1)) * _DURATION_UNITS.get(match.group(2), 1.0)
    if seconds < 0:
        raise ConfigError(f"duration must be non-negative: {value!r}")
    return seconds


@dataclass(frozen=True)
class RunConfig:
    countries: tuple[CountryConfig, ...]
    cues: CueConfig
    strategy: Strategy = Strategy.COLLAPSED
    backend: str = "replay"
    k: int = 3
    cache_path: Path | None = None
    corpus_path: Path | None = None
    rate_limit: float = 1.0
    output_format: str = "table"
    language: str = "en"
    workers: int | None = None
    cache_ttl: float | None = None

    def __post_init__(self) -> None:
        if not self.countries:
            raise ConfigError("at least one country is required")
        ids = [c.id for c in self.countries]
        if len(set(ids)) != len(ids):
            raise ConfigError("country ids must be unique")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(
                f"output_format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}"
            )
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")
        if self.backend == "replay" and self.cache_path is None:
            raise ConfigError("the replay backend requires cache_path")
        if self.backend == "corpus" and self.corpus_path is None:
            raise ConfigError("the corpus backend requires corpus_path")
        if self.rate_limit < 0:
            raise ConfigError(f"rate_limit must be non-negative, got {self.rate_limit}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if not self.language:
            raise ConfigError("language must be non-empty")

    def engine_params(self) -> dict[str, str]:
        """Out-of-band engine parameters; part of every cache key."""
        params = {"lr": f"lang_{self.language}"}
        params.update(self.cues.extra_params)
        return params


def _entry(value: Any, where: str) -> LexicalEntry:
    if isinstance(value, str):
        return LexicalEntry(value)
    if isinstance(value, dict):
        unknown = set(value) - {"text", "pre_escaped"}
        if unknown:
            raise ConfigError(f"{where}: unknown entry keys {sorted(unknown)}")
        if not isinstance(value.get("text"), str):
            raise ConfigError(f"{where}: entry needs a string 'text'")
        return LexicalEntry(value["text"], pre_escaped=bool(value.get("pre_escaped", False)))
    raise ConfigError(f"{where}: entry must be a string or an object, got {value!r}")


def _entry_list(value: Any, where: str) -> tuple[LexicalEntry, ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{where} must be an array")
    return tuple(_entry(v, where) for v in value)


def _country(value: Any) -> CountryConfig:
    if isinstance(value, str):
        return CountryConfig(id=value, variants=(LexicalEntry(value),))
    if isinstance(value, dict):
        unknown = set(value) - {"id", "variants"}
        if unknown:
            raise ConfigError(f"country: unknown keys {sorted(unknown)}")
        cid = value.get("id")
        if not isinstance(cid, str) or not cid:
            raise ConfigError("country needs a non-empty string 'id'")
        variants = value.get("variants")
        if variants is None:
            return CountryConfig(id=cid, variants=(LexicalEntry(cid),))
        return CountryConfig(id=cid, variants=_entry_list(variants, f"variants of {cid!r}"))
    raise ConfigError(f"country must be a string or an object, got {value!r}")


_TOP_KEYS = {
    "countries",
    "cues",
    "constraints",
    "engine_params",
    "strategy",
    "backend",
    "k",
    "cache_path",
    "corpus_path",
    "rate_limit",
    "output_format",
    "language",
    "workers",
    "cache_ttl",
}


def config_from_obj(obj: Mapping[str, Any], base_dir: Path) -> RunConfig:
    if not isinstance(obj, Mapping):
        raise ConfigError("config root must be an object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    countries_raw = obj.get("countries")
    if not isinstance(countries_raw, list) or not countries_raw:
        raise ConfigError("'countries' must be a non-empty array")
    countries = tuple(_country(c) for c in countries_raw)

    cues_raw = obj.get("cues")
    if not isinstance(cues_raw, dict):
        raise ConfigError("'cues' must be an object")
    unknown = set(cues_raw) - {"positive", "negative", "synonym_expansion"}
    if unknown:
        raise ConfigError(f"cues: unknown keys {sorted(unknown)}")

    engine_params_raw = obj.get("engine_params", {})
    if not isinstance(engine_params_raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in engine_params_raw.items()
    ):
        raise ConfigError("'engine_params' must map strings to strings")

    cues = CueConfig(
        positives=_entry_list(cues_raw.get("positive"), "cues.positive"),
        negatives=_entry_list(cues_raw.get("negative"), "cues.negative"),
        constraints=_entry_list(obj.get("constraints"), "constraints"),
        synonym_expansion=bool(cues_raw.get("synonym_expansion", False)),
        extra_params=dict(engine_params_raw),
    )

    strategy_raw = obj.get("strategy", "collapsed")
    try:
        strategy = Strategy(strategy_raw)
    except ValueError:
        raise ConfigError(
            f"strategy must be 'collapsed' or 'expanded', got {strategy_raw!r}"
        ) from None

    def path_of(key: str) -> Path | None:
        raw = obj.get(key)
        if raw is None:
            return None
        if not isinstance(raw, str) or not raw:
            raise ConfigError(f"'{key}' must be a non-empty string path")
        path = Path(raw)
        return path if path.is_absolute() else (base_dir / path)

    def int_of(key: str, default: int | None) -> int | None:
        raw = obj.get(key, default)
        if raw is None:
            return None
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise ConfigError(f"'{key}' must be an integer, got {raw!r}")
        return raw

    rate_raw = obj.get("rate_limit", 1.0)
    if isinstance(rate_raw, bool) or not isinstance(rate_raw, (int, float)):
        raise ConfigError(f"'rate_limit' must be a number, got {rate_raw!r}")

    ttl_raw = obj.get("cache_ttl")
    cache_ttl = None if ttl_raw is None else parse_duration(ttl_raw)

    k = int_of("k", 3)
    if k is None:
        k = 3

    backend = obj.get("backend", "replay")
    if not isinstance(backend, str):
        raise ConfigError(f"'backend' must be a string, got {backend!r}")
    output_format = obj.get("output_format", "table")
    if not isinstance(output_format, str):
        raise ConfigError(f"'output_format' must be a string, got {output_format!r}")
    language = obj.get("language", "en")
    if not isinstance(language, str):
        raise ConfigError(f"'language' must be a string, got {language!r}")

    return RunConfig(
        countries=countries,
        cues=cues,
        strategy=strategy,
        backend=backend,
        k=k,
        cache_path=path_of("cache_path"),
        corpus_path=path_of("corpus_path"),
        rate_limit=float(rate_raw),
        output_format=output_format,
        language=language,
        workers=int_of("workers", None),
        cache_ttl=cache_ttl,
    )


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_obj(obj, path.resolve().parent)
