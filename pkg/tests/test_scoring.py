import numpy as np
import pytest

from danmucast.curation import Topic
from danmucast.ingest import DanmuComment
from danmucast.providers import OfflineEngine, Provider, ProviderSuite
from danmucast.scoring import (
    ScoringConfig,
    coherence,
    creativity,
    diversity,
    informativeness,
    insertion_scores,
    pause_score,
    topic_quality,
)
from danmucast.segmentation import (
    NON_SPEECH_GAP,
    SPEECH_BREAK_POINT,
    InsertionPoint,
)
from danmucast.words import WORD_MODE_WHITESPACE


def comment(text, time_ms=1000):
    return DanmuComment(video_time_ms=time_ms, mode=1, color=0,
                        post_epoch_s=1, user_hash="u", text=text)


def topic(*texts, summary="s", description=None):
    return Topic(id=0, segment_id=0, summary=summary,
                 comments=[comment(t) for t in texts],
                 visual_description=description)


@pytest.fixture
def suite():
    return ProviderSuite(OfflineEngine())


class FixedProvider(Provider):
    """Returns canned values per capability; for formula isolation."""

    def __init__(self, **results):
        self.results = results

    def call(self, capability, payload):
        value = self.results[capability]
        return value(payload) if callable(value) else value


class TestInformativeness:
    def test_identical_text_scores_zero(self, suite):
        t = Topic(id=0, segment_id=0, summary="", comments=[comment("same text")])
        assert informativeness(t, " same text", suite) == pytest.approx(0.0, abs=1e-6)

    def test_disjoint_tokens_score_one(self, suite):
        t = topic("completely unrelated chatter")
        assert informativeness(t, "quarterly revenue figures", suite) == 1.0

    def test_empty_transcript_is_maximal(self, suite):
        assert informativeness(topic("anything"), "   ", suite) == 1.0

    def test_clamped_to_unit_interval(self):
        # Force sim slightly above 1 via a non-normalized fake embedding.
        fake = FixedProvider(embed=[1.1] + [0.0] * 255)
        value = informativeness(topic("x"), "y", ProviderSuite(fake))
        assert value == 0.0


class TestCreativityDiversity:
    @pytest.mark.parametrize("rating,expected", [(8, 0.8), (2, 0.2), (10, 1.0)])
    def test_creativity_normalization(self, rating, expected):
        suite = ProviderSuite(FixedProvider(creativity_rate=rating))
        assert creativity(topic("x"), suite) == pytest.approx(expected)

    def test_diversity_all_three(self, suite):
        t = topic("My favorite snack", "It is too sour", "I may give it a try")
        assert diversity(t, suite) == pytest.approx(1.0)

    def test_diversity_single_label(self, suite):
        t = topic("My favorite snack", "favorite snack nice")
        assert diversity(t, suite) == pytest.approx(1 / 3)

    def test_diversity_two_labels(self, suite):
        t = topic("My favorite snack", "It is too sour")
        assert diversity(t, suite) == pytest.approx(2 / 3)


class TestCoherence:
    def _points(self, raws):
        fake = ProviderSuite(FixedProvider(
            logprob=lambda payload: raws[payload["before"]]))
        points = [
            InsertionPoint(id=i, kind=NON_SPEECH_GAP, time_ms=i * 1000,
                           capacity_s=5.0, context_before=key)
            for i, key in enumerate(raws)
        ]
        return fake, points

    def test_min_max_endpoints(self):
        fake, points = self._points({"a": -50.0, "b": -80.0})
        result = coherence(topic("x"), points, fake)
        assert result == {0: 1.0, 1: 0.0}

    def test_single_candidate_is_one(self):
        fake, points = self._points({"a": -42.0})
        assert coherence(topic("x"), points, fake) == {0: 1.0}

    def test_linear_interpolation(self):
        fake, points = self._points({"a": -10.0, "b": -20.0, "c": -30.0})
        result = coherence(topic("x"), points, fake)
        assert result == pytest.approx({0: 1.0, 1: 0.5, 2: 0.0})

    def test_all_equal_raws_are_one(self):
        fake, points = self._points({"a": -7.0, "b": -7.0})
        assert coherence(topic("x"), points, fake) == {0: 1.0, 1: 1.0}

    def test_endpoints_present_with_distinct_raws(self):
        fake, points = self._points({"a": -3.0, "b": -9.0, "c": -5.5})
        values = coherence(topic("x"), points, fake).values()
        assert max(values) == 1.0 and min(values) == 0.0


class TestPause:
    CFG = ScoringConfig(word_mode=WORD_MODE_WHITESPACE)
    BREAK = InsertionPoint(id=0, kind=SPEECH_BREAK_POINT, time_ms=0,
                           capacity_s=10.0)
    GAP = InsertionPoint(id=1, kind=NON_SPEECH_GAP, time_ms=0, capacity_s=5.0)

    def test_fifteen_words_at_break(self):
        t = topic(" ".join(["word"] * 15))
        assert pause_score(t, self.BREAK, self.CFG) == pytest.approx(0.5)

    def test_gap_has_no_penalty(self):
        t = topic(" ".join(["word"] * 15))
        assert pause_score(t, self.GAP, self.CFG) == 0.0

    def test_clamped_at_budget(self):
        t = topic(" ".join(["word"] * 45))
        assert pause_score(t, self.BREAK, self.CFG) == 1.0


class TestCombination:
    def test_tq_weighted_sum(self):
        suite = ProviderSuite(FixedProvider(
            embed=([1.0] + [0.0] * 255), creativity_rate=8,
            sentiment="positive"))
        scores = topic_quality(topic("x"), "y", suite)
        # identical fake embeddings: s_info = 0; one label: 1/3; rating 0.8
        assert scores.tq == pytest.approx(0.0 + 0.8 + 1 / 3, abs=1e-9)

    def test_iq_formula(self):
        cfg = ScoringConfig(word_mode=WORD_MODE_WHITESPACE)
        fake = ProviderSuite(FixedProvider(
            logprob=lambda p: {"a": -10.0, "b": -20.0}[p["before"]]))
        points = [
            InsertionPoint(id=0, kind=SPEECH_BREAK_POINT, time_ms=0,
                           capacity_s=10.0, context_before="a"),
            InsertionPoint(id=1, kind=NON_SPEECH_GAP, time_ms=1, capacity_s=9.0,
                           context_before="b"),
        ]
        t = topic(" ".join(["word"] * 15))
        scores = {s.point_id: s for s in insertion_scores(t, points, fake, cfg)}
        assert scores[0].iq == pytest.approx(1.0 - 0.25 * 0.5, abs=1e-9)
        assert scores[1].iq == pytest.approx(0.0 - 0.25 * 0.0, abs=1e-9)

    def test_tq_range_with_reference_weights(self, suite):
        t = topic("My favorite snack", "It is too sour", "what happens next?")
        scores = topic_quality(t, "the original speech transcript", suite)
        assert 0.0 <= scores.tq <= 3.0
