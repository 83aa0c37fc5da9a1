import pytest
from hypothesis import given
from hypothesis import strategies as st

from stancemine.errors import AggregationError, InsufficientDataError
from stancemine.providers import HitCount
from stancemine.queries import CountryConfig, CueConfig, LexicalEntry, Strategy, build_batch
from stancemine.scoring import (
    FLAG_ESTIMATED,
    FLAG_OVERLAP_APPROX,
    FLAG_T_ADJUSTED,
    CountTriple,
    ScoreStatus,
    aggregate,
    contrast_factor,
    score,
    weight_factor,
)


def make_batch(strategy=Strategy.COLLAPSED, variants=("X",), positives=("allows",),
               negatives=("bans",), constraints=("bitcoin",)):
    country = CountryConfig(id=variants[0], variants=tuple(LexicalEntry(v) for v in variants))
    cues = CueConfig(
        positives=tuple(LexicalEntry(p) for p in positives),
        negatives=tuple(LexicalEntry(n) for n in negatives),
        constraints=tuple(LexicalEntry(s) for s in constraints),
    )
    return build_batch(strategy, country, cues)


def counts_for(batch, hits_by_role, estimated=False):
    out = []
    role_iters = {role: iter(hits) for role, hits in hits_by_role.items()}
    for spec in batch.specs:
        out.append(
            HitCount(
                query=spec.rendered,
                hits=next(role_iters[spec.role.value]),
                backend_id="corpus",
                retrieved_at=None,
                estimated=estimated,
            )
        )
    return out


class TestFactors:
    def test_contrast_example(self):
        assert contrast_factor(100, 33) == 0.67

    def test_contrast_is_signed(self):
        assert contrast_factor(33, 100) == -0.67
        assert contrast_factor(50, 50) == 0.0

    def test_contrast_undefined_at_zero(self):
        with pytest.raises(InsufficientDataError):
            contrast_factor(0, 0)

    def test_weight_examples(self):
        assert weight_factor(1456, 456, 2435) == pytest.approx(0.7852156, abs=1e-6)
        assert weight_factor(1000, 456, 2435) == pytest.approx(0.598, abs=5e-4)
        assert weight_factor(1, 0, 1000) == 0.001

    def test_weight_clamps_at_one(self):
        assert weight_factor(900, 900, 1000) == 1.0

    def test_weight_needs_positive_total(self):
        with pytest.raises(InsufficientDataError):
            weight_factor(1, 1, 0)


class TestScore:
    def test_product_examples(self):
        result = score(CountTriple("a", p=1000, n=456, t=2435))
        assert result.contrast == pytest.approx(0.544, abs=5e-4)
        assert result.weight == pytest.approx(0.598, abs=5e-4)
        assert result.r == pytest.approx(0.325312, abs=1e-3)
        assert result.status is ScoreStatus.OK
        assert result.flags == frozenset()

    def test_zero_evidence_is_not_a_zero_score(self):
        result = score(CountTriple("x", p=0, n=0, t=500))
        assert result.status is ScoreStatus.INSUFFICIENT_DATA
        assert result.r is None
        assert result.contrast is None
        assert result.weight is None

    def test_measured_neutrality_is_a_zero_score(self):
        result = score(CountTriple("x", p=7, n=7, t=100))
        assert result.status is ScoreStatus.OK
        assert result.r == 0.0

    def test_low_total_is_repaired_and_flagged(self):
        result = score(CountTriple("x", p=5, n=0, t=3))
        assert result.weight == 1.0
        assert FLAG_T_ADJUSTED in result.flags

    def test_overlapping_counts_clamp_the_weight(self):
        result = score(CountTriple("x", p=6, n=5, t=8))
        assert result.weight == 1.0
        assert FLAG_OVERLAP_APPROX in result.flags

    def test_incoming_flags_are_kept(self):
        triple = CountTriple("x", p=3, n=1, t=10, flags=frozenset({FLAG_ESTIMATED}))
        assert FLAG_ESTIMATED in score(triple).flags


class TestAggregate:
    def test_collapsed_passthrough(self):
        batch = make_batch()
        triple = aggregate(batch, counts_for(batch, {"positive": [7], "negative": [2], "total": [40]}))
        assert (triple.p, triple.n, triple.t) == (7, 2, 40)
        assert triple.flags == frozenset()

    def test_collapsed_total_repair(self):
        batch = make_batch()
        triple = aggregate(batch, counts_for(batch, {"positive": [5], "negative": [0], "total": [3]}))
        assert (triple.p, triple.n, triple.t) == (5, 0, 5)
        assert triple.flags == frozenset({FLAG_T_ADJUSTED})

    def test_expanded_sums_and_flags_overlap(self):
        batch = make_batch(strategy=Strategy.EXPANDED, constraints=("bitcoin", "crypto"))
        triple = aggregate(
            batch,
            counts_for(batch, {"positive": [3, 2], "negative": [1, 0], "total": [10, 4]}),
        )
        assert (triple.p, triple.n, triple.t) == (5, 1, 14)
        assert FLAG_OVERLAP_APPROX in triple.flags

    def test_expanded_single_cell_does_not_flag(self):
        batch = make_batch(strategy=Strategy.EXPANDED)
        triple = aggregate(batch, counts_for(batch, {"positive": [3], "negative": [1], "total": [10]}))
        assert triple.flags == frozenset()

    def test_estimated_propagates(self):
        batch = make_batch()
        triple = aggregate(
            batch, counts_for(batch, {"positive": [1], "negative": [1], "total": [5]}, estimated=True)
        )
        assert FLAG_ESTIMATED in triple.flags
        assert FLAG_ESTIMATED in score(triple).flags

    def test_missing_count_is_an_error(self):
        batch = make_batch()
        counts = counts_for(batch, {"positive": [1], "negative": [1], "total": [5]})[:-1]
        with pytest.raises(AggregationError):
            aggregate(batch, counts)

    def test_duplicate_count_is_an_error(self):
        batch = make_batch()
        counts = counts_for(batch, {"positive": [1], "negative": [1], "total": [5]})
        with pytest.raises(AggregationError):
            aggregate(batch, counts + [counts[0]])

    def test_unrelated_count_is_an_error(self):
        batch = make_batch()
        counts = counts_for(batch, {"positive": [1], "negative": [1], "total": [5]})
        counts[0] = HitCount("some other query", 3, "corpus", None, False)
        with pytest.raises(AggregationError):
            aggregate(batch, counts)


count_pairs = st.tuples(st.integers(0, 10_000), st.integers(0, 10_000)).filter(
    lambda pn: pn != (0, 0)
)


class TestProperties:
    @given(count_pairs, st.integers(1, 50_000))
    def test_score_stays_bounded(self, pn, extra):
        p, n = pn
        triple = CountTriple("x", p=p, n=n, t=max(p, n) + extra)
        result = score(triple)
        assert result.status is ScoreStatus.OK
        assert -1.0 <= result.contrast <= 1.0
        assert 0.0 < result.weight <= 1.0
        assert -1.0 <= result.r <= 1.0
        assert result.r == result.contrast * result.weight

    @given(count_pairs)
    def test_contrast_sign_tracks_the_majority(self, pn):
        p, n = pn
        value = contrast_factor(p, n)
        if p > n:
            assert value > 0
        elif p < n:
            assert value < 0
        else:
            assert value == 0

    @given(count_pairs, st.integers(2, 50))
    def test_contrast_is_scale_invariant(self, pn, factor):
        p, n = pn
        assert contrast_factor(p * factor, n * factor) == pytest.approx(
            contrast_factor(p, n), abs=1e-12
        )

    @given(count_pairs)
    def test_contrast_grows_with_p(self, pn):
        p, n = pn
        assert contrast_factor(p + 1, n) >= contrast_factor(p, n)

    @given(count_pairs, st.integers(1, 10_000))
    def test_weight_shrinks_with_t(self, pn, t):
        p, n = pn
        t = max(t, p + n)
        assert weight_factor(p, n, t + 1) <= weight_factor(p, n, t)

    @given(count_pairs)
    def test_antisymmetry(self, pn):
        p, n = pn
        assert contrast_factor(p, n) == -contrast_factor(n, p)
