"""Topic-quality and insertion-quality metrics.

Topic quality: TQ = li * s_info + lc * s_creativity + ld * s_diversity,
each component scaled to [0, 1]. Insertion quality: IQ = s_cohe - lp *
s_pause. The pause penalty applies only at speech breaks; non-speech gaps
do not pause playback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curation import Topic, TopicScores
from .ingest import TimedSentence
from .providers import ProviderSuite
from .segmentation import SPEECH_BREAK_POINT, InsertionPoint, Segment
from .words import WORD_MODE_CJK, count_words


@dataclass(frozen=True)
class ScoringConfig:
    weight_info: float = 1.0
    weight_creativity: float = 1.0
    weight_diversity: float = 1.0
    weight_pause: float = 0.25
    objective_weight: float = 10.0   # reward weight on IQ in the solver
    max_pause_s: float = 10.0
    words_per_s: float = 3.0
    word_mode: str = WORD_MODE_CJK


@dataclass(frozen=True)
class InsertionScore:
    topic_id: int
    point_id: int
    s_cohe: float
    s_pause: float
    iq: float


# ---------------------------------------------------------------------------

def informativeness(topic: Topic, segment_transcript: str,
                    providers: ProviderSuite) -> float:
    """1 minus cosine similarity to the segment transcript, clamped to [0, 1].

    An empty transcript (pure music segment) maps to 1.0: any comment is
    maximally novel there.
    """
    if not segment_transcript.strip():
        return 1.0
    sim = float(np.dot(providers.embed(topic.text()),
                       providers.embed(segment_transcript)))
    return min(1.0, max(0.0, 1.0 - sim))


def creativity(topic: Topic, providers: ProviderSuite) -> float:
    return providers.rate_creativity(topic.text()) / 10.0


def diversity(topic: Topic, providers: ProviderSuite) -> float:
    labels = {providers.sentiment(c.text) for c in topic.comments}
    return len(labels) / 3.0


def topic_quality(topic: Topic, segment_transcript: str,
                  providers: ProviderSuite,
                  config: ScoringConfig = ScoringConfig()) -> TopicScores:
    s_info = informativeness(topic, segment_transcript, providers)
    s_cre = creativity(topic, providers)
    s_div = diversity(topic, providers)
    tq = (config.weight_info * s_info
          + config.weight_creativity * s_cre
          + config.weight_diversity * s_div)
    return TopicScores(s_info=s_info, s_creativity=s_cre,
                       s_diversity=s_div, tq=tq)


# ---------------------------------------------------------------------------

def coherence(topic: Topic, candidate_points: list[InsertionPoint],
              providers: ProviderSuite, lm_key: str = "") -> dict[int, float]:
    """Min-max normalized log probability across this topic's candidates.

    A single candidate, or all-equal raw values, normalize to 1.0 (no
    preference rather than a division by zero).
    """
    if not candidate_points:
        raise ValueError("coherence requires a non-empty candidate set")
    raw = {
        p.id: providers.logprob(p.context_before, topic.text(),
                                p.context_after, lm_key)
        for p in candidate_points
    }
    lo, hi = min(raw.values()), max(raw.values())
    if hi - lo < 1e-12:
        return {pid: 1.0 for pid in raw}
    return {pid: (v - lo) / (hi - lo) for pid, v in raw.items()}


def pause_score(topic: Topic, point: InsertionPoint,
                config: ScoringConfig = ScoringConfig()) -> float:
    """Pause penalty component: spoken seconds over the pause budget.

    Zero at non-speech gaps, where playback never stops.
    """
    if point.kind != SPEECH_BREAK_POINT:
        return 0.0
    words = sum(count_words(c.text, config.word_mode) for c in topic.comments)
    if topic.visual_description:
        words += count_words(topic.visual_description, config.word_mode)
    pause_s = words / config.words_per_s
    return min(1.0, pause_s / config.max_pause_s)


def insertion_scores(
    topic: Topic,
    candidate_points: list[InsertionPoint],
    providers: ProviderSuite,
    config: ScoringConfig = ScoringConfig(),
    lm_key: str = "",
) -> list[InsertionScore]:
    cohe = coherence(topic, candidate_points, providers, lm_key)
    out = []
    for p in candidate_points:
        s_pause = pause_score(topic, p, config)
        out.append(InsertionScore(
            topic_id=topic.id, point_id=p.id,
            s_cohe=cohe[p.id], s_pause=s_pause,
            iq=cohe[p.id] - config.weight_pause * s_pause,
        ))
    return out


def segment_transcript_text(segment: Segment,
                            sentences: list[TimedSentence]) -> str:
    by_id = {s.index: s for s in sentences}
    return " ".join(by_id[i].text for i in segment.sentence_ids)
