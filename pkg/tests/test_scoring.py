"""Scoring: gains, orientation multipliers, pick scores, player totals.

The sign convention is pinned by an oracle: over random price pairs, a
correct call must score positive and the mirrored call negative.
"""

from __future__ import annotations

import random
from datetime import timedelta

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdpicks.model import Config, Orientation, PricePoint
from crowdpicks.scoring import (
    gain,
    is_mature,
    multipliers,
    player_score,
    score_prediction,
)

from helpers import at, make_prediction, make_score

CONFIG = Config()

prices = st.floats(min_value=0.01, max_value=1e6, allow_nan=False, allow_infinity=False)


class TestGain:
    def test_entry_normalized_to_100(self):
        assert gain(100.0, 110.0) == pytest.approx(110.0, rel=1e-12)
        assert gain(80.0, 60.0) == 75.0

    @pytest.mark.parametrize("value", [0.37, 1.0, 99.5, 12345.0])
    def test_flat_price_is_exactly_100(self, value):
        assert gain(value, value) == 100.0

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            gain(0.0, 10.0)
        with pytest.raises(ValueError):
            gain(10.0, -1.0)


class TestMultipliers:
    def test_orientations(self):
        assert multipliers(Orientation.OUTPERFORM) == (1, -1)
        assert multipliers(Orientation.UNDERPERFORM) == (-1, 1)

    def test_multipliers_are_opposed(self):
        for o in Orientation:
            m_stock, m_index = multipliers(o)
            assert m_stock * m_index == -1

    def test_sign_convention_rewards_correct_calls(self):
        # Oracle: whoever called the realized direction must score positive.
        rng = random.Random(1711)
        for _ in range(500):
            entry_s, entry_i = rng.uniform(1, 500), rng.uniform(1, 500)
            obs_s, obs_i = rng.uniform(1, 500), rng.uniform(1, 500)
            stock_outperformed = obs_s / entry_s > obs_i / entry_i
            out, under = _score_pair(entry_s, entry_i, obs_s, obs_i)
            if stock_outperformed:
                assert out.score > 0 > under.score
            elif obs_s / entry_s < obs_i / entry_i:
                assert out.score < 0 < under.score


def _score_pair(entry_s, entry_i, obs_s, obs_i, now=None):
    now = now if now is not None else at(10)
    stock_now = PricePoint("AAA", now, obs_s)
    index_now = PricePoint("IDX", now, obs_i)
    out = make_prediction(
        orientation=Orientation.OUTPERFORM, stock_entry=entry_s, index_entry=entry_i
    )
    under = make_prediction(
        orientation=Orientation.UNDERPERFORM, stock_entry=entry_s, index_entry=entry_i
    )
    return (
        score_prediction(out, stock_now, index_now, CONFIG, now),
        score_prediction(under, stock_now, index_now, CONFIG, now),
    )


class TestScorePrediction:
    def test_outperform_worked_example(self):
        out, under = _score_pair(100.0, 100.0, 110.0, 104.0)
        assert out.score == pytest.approx(6.0)
        assert under.score == pytest.approx(-6.0)

    def test_equal_moves_score_zero(self):
        out, _ = _score_pair(50.0, 200.0, 50.0, 200.0)
        assert out.score == 0.0

    def test_score_composes_gains_and_multipliers(self):
        out, _ = _score_pair(100.0, 100.0, 110.0, 104.0)
        assert out.score == out.stock_gain * out.stock_multiplier + out.index_gain * out.index_multiplier
        assert out.stock_multiplier == -out.index_multiplier

    def test_ticker_mismatch_rejected(self):
        p = make_prediction()
        with pytest.raises(ValueError):
            score_prediction(p, PricePoint("BBB", at(10), 1.0), PricePoint("IDX", at(10), 1.0), CONFIG, at(10))
        with pytest.raises(ValueError):
            score_prediction(p, PricePoint("AAA", at(10), 1.0), PricePoint("XXX", at(10), 1.0), CONFIG, at(10))

    def test_future_observation_rejected(self):
        p = make_prediction()
        with pytest.raises(ValueError):
            score_prediction(
                p, PricePoint("AAA", at(11), 1.0), PricePoint("IDX", at(10), 1.0), CONFIG, at(10)
            )

    @given(entry_s=prices, entry_i=prices, obs_s=prices, obs_i=prices)
    def test_antisymmetry_is_exact(self, entry_s, entry_i, obs_s, obs_i):
        out, under = _score_pair(entry_s, entry_i, obs_s, obs_i)
        assert out.score + under.score == 0.0

    @given(entry_s=prices, entry_i=prices, obs_s=prices, obs_i=prices, shift=st.floats(-50, 50))
    def test_common_percentage_move_cancels(self, entry_s, entry_i, obs_s, obs_i, shift):
        # Shifting both gains by the same number of percentage points must
        # leave the score unchanged: only the relative move matters.
        shifted_s = obs_s + entry_s * shift / 100.0
        shifted_i = obs_i + entry_i * shift / 100.0
        if shifted_s <= 0 or shifted_i <= 0:
            return
        base, _ = _score_pair(entry_s, entry_i, obs_s, obs_i)
        moved, _ = _score_pair(entry_s, entry_i, shifted_s, shifted_i)
        assert moved.score == pytest.approx(base.score, abs=1e-9, rel=1e-9)


class TestMaturity:
    def test_boundary_is_inclusive(self):
        p = make_prediction(entered_at=at(0))
        assert is_mature(p, CONFIG, at(7))
        assert not is_mature(p, CONFIG, at(7) - timedelta(seconds=1))

    @given(extra=st.integers(min_value=0, max_value=10_000))
    def test_maturity_is_monotone_in_time(self, extra):
        p = make_prediction(entered_at=at(0))
        first_mature = at(0) + CONFIG.pending_period
        assert is_mature(p, CONFIG, first_mature + timedelta(minutes=extra))


class TestPlayerScore:
    def test_mixed_example(self):
        scores = [make_score(6.0), make_score(-2.0), make_score(9.0, mature=False)]
        total = player_score("pl-1", scores, CONFIG)
        assert total.total_score == pytest.approx(4.0)
        assert total.counted_predictions == 2

    def test_threshold_drops_small_positives(self):
        config = Config(positive_score_threshold=5.0)
        scores = [make_score(3.0), make_score(10.0)]
        total = player_score("pl-1", scores, config)
        # Oracle: filter then sum.
        expected = [s.score for s in scores if not (0 < s.score < 5.0)]
        assert total.total_score == pytest.approx(sum(expected)) == 10.0
        assert total.counted_predictions == len(expected) == 1

    def test_score_at_threshold_counts(self):
        config = Config(positive_score_threshold=5.0)
        total = player_score("pl-1", [make_score(5.0)], config)
        assert total.counted_predictions == 1

    def test_negative_scores_always_count(self):
        config = Config(positive_score_threshold=5.0)
        total = player_score("pl-1", [make_score(-0.5), make_score(-20.0)], config)
        assert total.total_score == pytest.approx(-20.5)
        assert total.counted_predictions == 2

    def test_empty_is_zero(self):
        total = player_score("pl-1", [], CONFIG)
        assert total.total_score == 0.0
        assert total.counted_predictions == 0

    @given(
        values=st.lists(st.floats(-100, 100, allow_nan=False), max_size=20),
        threshold=st.floats(0, 10),
        seed=st.integers(0, 2**16),
    )
    def test_permutation_invariance(self, values, threshold, seed):
        config = Config(positive_score_threshold=threshold)
        scores = [make_score(v, mature=i % 3 != 0) for i, v in enumerate(values)]
        shuffled = list(scores)
        random.Random(seed).shuffle(shuffled)
        a = player_score("pl-1", scores, config)
        b = player_score("pl-1", shuffled, config)
        assert a.counted_predictions == b.counted_predictions
        assert a.total_score == pytest.approx(b.total_score, abs=1e-9)
