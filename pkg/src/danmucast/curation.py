"""Comment curation: assignment to segments, topic grouping, dialogue
reordering, and visual-context descriptions."""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass, field, replace

import numpy as np

from .ingest import DanmuComment, KeyframeRef
from .providers import ProviderSuite
from .segmentation import Segment
from .words import WORD_MODE_CJK, count_words

log = logging.getLogger(__name__)

MAX_DESCRIPTION_WORDS = 15
DUPLICATE_DESC_COSINE = 0.9
WORDS_PER_S = 3.0


@dataclass
class TopicScores:
    s_info: float = 0.0
    s_creativity: float = 0.0
    s_diversity: float = 0.0
    tq: float = 0.0


@dataclass
class Topic:
    """A curated discussion unit scoped to one segment."""

    id: int
    segment_id: int
    summary: str
    comments: list[DanmuComment]
    visual_description: str | None = None
    length_s: float = 0.0
    scores: TopicScores = field(default_factory=TopicScores)

    def text(self) -> str:
        """Concatenated summary and comment texts, the scoring surface."""
        return " ".join([self.summary] + [c.text for c in self.comments])


# ---------------------------------------------------------------------------

def assign_comments(
    comments: list[DanmuComment], segments: list[Segment]
) -> dict[int, list[DanmuComment]]:
    """Map each comment to the segment containing its video time.

    A comment exactly on a boundary belongs to the later segment; a
    comment at the video's end belongs to the final segment.
    """
    starts = [s.start_ms for s in segments]
    assigned: dict[int, list[DanmuComment]] = {s.id: [] for s in segments}
    for c in comments:
        idx = bisect_right(starts, c.video_time_ms) - 1
        idx = max(0, min(idx, len(segments) - 1))
        assigned[segments[idx].id].append(c)
    return assigned


def group_topics(
    segment_id: int,
    comments: list[DanmuComment],
    providers: ProviderSuite,
    next_topic_id: int = 0,
) -> tuple[list[Topic], int]:
    """Cluster one segment's comments into topics.

    Returns ``(topics, untopiced_count)``; comments the provider leaves out
    are discarded and reported.
    """
    if not comments:
        return [], 0
    groups = providers.group_topics([c.text for c in comments])
    topics = []
    used: set[int] = set()
    for k, group in enumerate(groups):
        indices = [i for i in group["indices"] if 0 <= i < len(comments)]
        if not indices:
            continue
        used.update(indices)
        topics.append(Topic(
            id=next_topic_id + k,
            segment_id=segment_id,
            summary=group["summary"],
            comments=[comments[i] for i in indices],
        ))
    untopiced = len(comments) - len(used)
    if untopiced:
        log.info("segment %d: %d comments left untopiced", segment_id, untopiced)
    return topics, untopiced


def dedupe_and_order(topic: Topic, providers: ProviderSuite) -> Topic:
    """Drop exact duplicates (keeping the earliest) and order the rest."""
    def norm(text: str) -> str:
        return " ".join(text.casefold().split())

    by_time = sorted(topic.comments,
                     key=lambda c: (c.video_time_ms, c.post_epoch_s, c.user_hash))
    seen: set[str] = set()
    unique: list[DanmuComment] = []
    for c in by_time:
        key = norm(c.text)
        if key in seen:
            continue
        seen.add(key)
        unique.append(c)

    order = providers.reorder_dialogue([
        {"text": c.text, "time_ms": c.video_time_ms, "epoch": c.post_epoch_s}
        for c in unique
    ])
    return replace(topic, comments=[unique[i] for i in order])


def describe_visual(
    topics: list[Topic],
    keyframes: list[KeyframeRef],
    segment: Segment,
    providers: ProviderSuite,
) -> list[Topic]:
    """Attach at most one visual description per distinct visual subject.

    Keyframes outside the segment are ignored; with no keyframes in range
    no provider call is made. Descriptions longer than the word limit are
    truncated; near-duplicate descriptions within the segment collapse
    onto the first topic that earned them.
    """
    in_range = [kf for kf in keyframes
                if segment.start_ms <= kf.time_ms < segment.end_ms]
    if not in_range:
        return topics

    accepted: list[np.ndarray] = []
    out = []
    for topic in topics:
        desc = providers.describe_visual(
            topic.text(), [kf.caption_hint for kf in in_range]
        )
        if desc is not None:
            words = desc.split()
            if len(words) > MAX_DESCRIPTION_WORDS:
                log.warning("truncating %d-word description for topic %d",
                            len(words), topic.id)
                desc = " ".join(words[:MAX_DESCRIPTION_WORDS])
            vec = providers.embed(desc)
            if any(float(np.dot(vec, prev)) >= DUPLICATE_DESC_COSINE
                   for prev in accepted):
                desc = None
            else:
                accepted.append(vec)
        out.append(replace(topic, visual_description=desc))
    return out


def finalize_length(topic: Topic, word_mode: str = WORD_MODE_CJK,
                    words_per_s: float = WORDS_PER_S) -> Topic:
    """Set the spoken length: total words divided by the speech rate."""
    words = sum(count_words(c.text, word_mode) for c in topic.comments)
    if topic.visual_description:
        words += count_words(topic.visual_description, word_mode)
    return replace(topic, length_s=words / words_per_s)


def curate_segment(
    segment: Segment,
    comments: list[DanmuComment],
    keyframes: list[KeyframeRef],
    providers: ProviderSuite,
    next_topic_id: int = 0,
    word_mode: str = WORD_MODE_CJK,
    words_per_s: float = WORDS_PER_S,
) -> tuple[list[Topic], int]:
    """Full curation for one segment; returns topics and the discard count."""
    topics, untopiced = group_topics(segment.id, comments, providers,
                                     next_topic_id)
    topics = [dedupe_and_order(t, providers) for t in topics]
    topics = describe_visual(topics, keyframes, segment, providers)
    topics = [finalize_length(t, word_mode, words_per_s) for t in topics]
    return topics, untopiced
