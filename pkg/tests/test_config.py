import json

import pytest

from stancemine.config import RunConfig, load_config, parse_duration
from stancemine.errors import ConfigError
from stancemine.queries import Strategy


def write_config(tmp_path, overrides=None, drop=()):
    base = {
        "countries": ["Gibraltar", "France"],
        "cues": {"positive": ["allows"], "negative": ["bans"]},
        "constraints": ["bitcoin"],
        "backend": "replay",
        "cache_path": "cache.jsonl",
    }
    base.update(overrides or {})
    for key in drop:
        base.pop(key, None)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(base), encoding="utf-8")
    return path


class TestLoading:
    def test_minimal_config(self, tmp_path):
        config = load_config(write_config(tmp_path))
        assert [c.id for c in config.countries] == ["Gibraltar", "France"]
        assert config.strategy is Strategy.COLLAPSED
        assert config.backend == "replay"
        assert config.k == 3
        assert config.output_format == "table"
        assert config.language == "en"
        assert config.workers is None
        assert config.cache_ttl is None

    def test_relative_paths_resolve_against_the_config_dir(self, tmp_path):
        config = load_config(write_config(tmp_path))
        assert config.cache_path == tmp_path / "cache.jsonl"

    def test_absolute_paths_pass_through(self, tmp_path):
        path = write_config(tmp_path, {"cache_path": "/var/data/cache.jsonl"})
        assert load_config(path).cache_path.as_posix() == "/var/data/cache.jsonl"

    def test_country_object_with_variants(self, tmp_path):
        path = write_config(
            tmp_path,
            {"countries": [{"id": "USA", "variants": ["USA", "United States of America"]}]},
        )
        config = load_config(path)
        assert config.countries[0].id == "USA"
        assert [v.text for v in config.countries[0].variants] == [
            "USA",
            "United States of America",
        ]

    def test_country_string_shorthand(self, tmp_path):
        config = load_config(write_config(tmp_path, {"countries": ["Malta"]}))
        assert [v.text for v in config.countries[0].variants] == ["Malta"]

    def test_pre_escaped_entry_object(self, tmp_path):
        path = write_config(
            tmp_path,
            {"cues": {"positive": [{"text": "~permit", "pre_escaped": True}], "negative": ["bans"]}},
        )
        config = load_config(path)
        assert config.cues.positives[0].text == "~permit"
        assert config.cues.positives[0].pre_escaped is True

    def test_engine_params_and_language(self, tmp_path):
        path = write_config(
            tmp_path, {"engine_params": {"hq": "central bank"}, "language": "fr"}
        )
        config = load_config(path)
        assert config.engine_params() == {"lr": "lang_fr", "hq": "central bank"}

    def test_cache_ttl_duration_string(self, tmp_path):
        config = load_config(write_config(tmp_path, {"cache_ttl": "24h"}))
        assert config.cache_ttl == 86400.0


class TestRejection:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unknown_top_level_key(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown config keys"):
            load_config(write_config(tmp_path, {"countres": ["typo"]}))

    def test_unknown_cues_key(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(
                write_config(tmp_path, {"cues": {"positive": ["a"], "negative": ["b"], "extra": 1}})
            )

    def test_empty_countries(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"countries": []}))

    def test_duplicate_countries(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"countries": ["Malta", "Malta"]}))

    def test_bad_strategy(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"strategy": "both"}))

    def test_bad_backend(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"backend": "webscale"}))

    def test_bad_output_format(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"output_format": "xml"}))

    def test_replay_needs_cache_path(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, drop=("cache_path",)))

    def test_corpus_needs_corpus_path(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"backend": "corpus"}))

    def test_bad_k(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"k": 0}))
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"k": "three"}))

    def test_bad_workers(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"workers": 0}))

    def test_negative_rate_limit(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"rate_limit": -1}))

    def test_reserved_characters_in_entries(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, {"constraints": ["bit|coin"]}))


class TestDuration:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("0", 0.0),
            ("45s", 45.0),
            ("10m", 600.0),
            ("24h", 86400.0),
            ("7d", 604800.0),
            ("90", 90.0),
            (90, 90.0),
            (1.5, 1.5),
            ("1.5h", 5400.0),
        ],
    )
    def test_accepted_forms(self, raw, expected):
        assert parse_duration(raw) == expected

    @pytest.mark.parametrize("raw", ["", "fast", "10x", "-5s", "h", None, True])
    def test_rejected_forms(self, raw):
        with pytest.raises(ConfigError):
            parse_duration(raw)
