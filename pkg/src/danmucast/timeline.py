"""Schedule construction: from an optimized assignment to a playable
manifest.

Auto-play entries lay discussion lines back to back inside non-speech
gaps; speech breaks become on-demand entries that only emit a
notification cue on the main timeline, with a rewind target for when the
player returns from on-demand playback. Tone selection is seeded so
manifests are byte-reproducible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .curation import Topic
from .errors import CapacityViolation
from .ingest import TimedSentence
from .optimizer import Assignment
from .segmentation import (
    NON_SPEECH_GAP,
    SPEECH_BREAK_POINT,
    InsertionPoint,
    Segment,
    SpeechBreak,
)
from .words import WORD_MODE_CJK, count_words

MANIFEST_VERSION = 1
RESPONSE_WINDOW_S = 5
VIEWER_TONES = ("V1", "V2", "V3")
NARRATOR_TONE = "Narrator"

AUTO_PLAY = "AutoPlay"
ON_DEMAND = "OnDemand"
LEFT = "Left"
RIGHT = "Right"


@dataclass
class DiscussionLine:
    line_id: str
    speaker: str          # "Narrator" or "Viewer"
    tone: str             # NARRATOR_TONE or one of VIEWER_TONES
    text: str
    est_duration_s: float
    offset_ms: int        # from entry start (AutoPlay: on the video timeline)


@dataclass
class TimelineEntry:
    kind: str                      # AUTO_PLAY or ON_DEMAND
    point_id: int
    time_ms: int                   # AutoPlay start / OnDemand notify time
    lines: list[DiscussionLine]
    notify_side: str | None = None         # OnDemand only
    rewind_target_ms: int | None = None    # OnDemand only
    response_window_s: int = RESPONSE_WINDOW_S


@dataclass
class TimelineManifest:
    video_ref: str
    duration_ms: int
    entries: list[TimelineEntry]
    toggle_default: str = "on"
    assets: dict[str, str] = field(default_factory=dict)
    sample_rate: int = 44100
    manifest_version: int = MANIFEST_VERSION


# ---------------------------------------------------------------------------
# Scripts
# ---------------------------------------------------------------------------

def build_script(
    topic: Topic,
    rng: random.Random,
    prev_tone: str | None = None,
    word_mode: str = WORD_MODE_CJK,
    words_per_s: float = 3.0,
) -> list[DiscussionLine]:
    """One narrator line (when a description exists) then one viewer line
    per comment, with no two adjacent lines sharing a tone."""
    lines: list[DiscussionLine] = []
    if topic.visual_description:
        lines.append(DiscussionLine(
            line_id="", speaker="Narrator", tone=NARRATOR_TONE,
            text=topic.visual_description,
            est_duration_s=count_words(topic.visual_description,
                                       word_mode) / words_per_s,
            offset_ms=0,
        ))
        prev_tone = NARRATOR_TONE
    for comment in topic.comments:
        tone = rng.choice(VIEWER_TONES)
        while tone == prev_tone:
            tone = rng.choice(VIEWER_TONES)
        lines.append(DiscussionLine(
            line_id="", speaker="Viewer", tone=tone, text=comment.text,
            est_duration_s=count_words(comment.text, word_mode) / words_per_s,
            offset_ms=0,
        ))
        prev_tone = tone
    return lines


def _entry_script(
    point: InsertionPoint,
    topic_ids: list[int],
    topics_by_id: dict[int, Topic],
    seed: int,
    word_mode: str,
    words_per_s: float,
) -> list[DiscussionLine]:
    # One rng per entry keyed by seed and point id; adjacency is enforced
    # across topic seams by threading the previous tone through.
    rng = random.Random(f"danmucast:{seed}:{point.id}")
    lines: list[DiscussionLine] = []
    prev_tone: str | None = None
    for tid in topic_ids:
        topic_lines = build_script(topics_by_id[tid], rng, prev_tone,
                                   word_mode, words_per_s)
        for k, line in enumerate(topic_lines):
            line.line_id = f"p{point.id}_t{tid}_l{k}"
        lines.extend(topic_lines)
        if lines:
            prev_tone = lines[-1].tone
    # Cumulative rounding keeps the total within half a millisecond of the
    # exact sum regardless of line count.
    elapsed = 0.0
    for line in lines:
        line.offset_ms = round(elapsed * 1000)
        elapsed += line.est_duration_s
    return lines


# ---------------------------------------------------------------------------
# Entries
# ---------------------------------------------------------------------------

def schedule_autoplay(point: InsertionPoint,
                      lines: list[DiscussionLine]) -> TimelineEntry | None:
    """Sequential lines from the gap's insertable start; one speaker at a
    time. Returns None when the gap received no topics."""
    if not lines:
        return None
    total_ms = lines[-1].offset_ms + round(lines[-1].est_duration_s * 1000)
    if total_ms > round(point.capacity_s * 1000) + 1:
        raise CapacityViolation(
            f"point {point.id}: scripts need {total_ms} ms, "
            f"capacity {point.capacity_s:.3f} s"
        )
    return TimelineEntry(kind=AUTO_PLAY, point_id=point.id,
                         time_ms=point.time_ms, lines=lines)


def rewind_target(
    brk: SpeechBreak,
    all_breaks: list[SpeechBreak],
    segments: list[Segment],
    sentences: list[TimedSentence],
) -> int:
    """Start of the first sentence after the previous break in the same
    speech segment, or after the segment start for the first break."""
    segment = next(s for s in segments
                   if s.start_ms <= brk.time_ms <= s.end_ms
                   and brk.preceding_sentence_id in s.sentence_ids)
    prior = [b for b in all_breaks
             if b.time_ms < brk.time_ms
             and b.preceding_sentence_id in segment.sentence_ids]
    boundary = max((b.time_ms for b in prior), default=segment.start_ms)
    for s in sorted(sentences, key=lambda s: s.start_ms):
        if s.start_ms >= boundary:
            return s.start_ms
    return boundary


def schedule_ondemand(
    point: InsertionPoint,
    lines: list[DiscussionLine],
    brk: SpeechBreak,
    all_breaks: list[SpeechBreak],
    segments: list[Segment],
    sentences: list[TimedSentence],
) -> TimelineEntry | None:
    """Notification entry at a speech break; the video keeps playing at
    notify time, playback happens only after a shake."""
    if not lines:
        return None
    side = LEFT if lines[0].speaker == "Narrator" else RIGHT
    return TimelineEntry(
        kind=ON_DEMAND, point_id=point.id, time_ms=point.time_ms,
        lines=lines, notify_side=side,
        rewind_target_ms=rewind_target(brk, all_breaks, segments, sentences),
    )


def build_timeline(
    assignment: Assignment,
    topics: list[Topic],
    points: list[InsertionPoint],
    breaks: list[SpeechBreak],
    segments: list[Segment],
    sentences: list[TimedSentence],
    video_ref: str,
    duration_ms: int,
    seed: int = 0,
    word_mode: str = WORD_MODE_CJK,
    words_per_s: float = 3.0,
) -> TimelineManifest:
    topics_by_id = {t.id: t for t in topics}
    breaks_by_time = {b.time_ms: b for b in breaks}
    entries: list[TimelineEntry] = []
    for point in points:
        topic_ids = assignment.per_point_order.get(point.id, [])
        lines = _entry_script(point, topic_ids, topics_by_id, seed,
                              word_mode, words_per_s)
        if point.kind == NON_SPEECH_GAP:
            entry = schedule_autoplay(point, lines)
        else:
            assert point.kind == SPEECH_BREAK_POINT
            entry = schedule_ondemand(point, lines, breaks_by_time[point.time_ms],
                                      breaks, segments, sentences)
        if entry is not None:
            entries.append(entry)
    entries.sort(key=lambda e: (e.time_ms, e.point_id))

    manifest = TimelineManifest(video_ref=video_ref, duration_ms=duration_ms,
                                entries=entries)
    for entry in entries:
        for line in entry.lines:
            manifest.assets[line.line_id] = f"assets/{line.line_id}.wav"
    return manifest


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def manifest_to_json(manifest: TimelineManifest) -> str:
    doc = {
        "manifest_version": manifest.manifest_version,
        "video_ref": manifest.video_ref,
        "duration_ms": manifest.duration_ms,
        "sample_rate": manifest.sample_rate,
        "toggle_default": manifest.toggle_default,
        "assets": dict(sorted(manifest.assets.items())),
        "entries": [
            {
                "kind": e.kind,
                "point_id": e.point_id,
                "time_ms": e.time_ms,
                "notify_side": e.notify_side,
                "rewind_target_ms": e.rewind_target_ms,
                "response_window_s": e.response_window_s,
                "lines": [
                    {
                        "line_id": ln.line_id,
                        "speaker": ln.speaker,
                        "tone": ln.tone,
                        "text": ln.text,
                        "est_duration_s": round(ln.est_duration_s, 6),
                        "offset_ms": ln.offset_ms,
                    }
                    for ln in e.lines
                ],
            }
            for e in manifest.entries
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def manifest_from_json(text: str) -> TimelineManifest:
    doc = json.loads(text)
    entries = [
        TimelineEntry(
            kind=e["kind"], point_id=e["point_id"], time_ms=e["time_ms"],
            notify_side=e["notify_side"],
            rewind_target_ms=e["rewind_target_ms"],
            response_window_s=e["response_window_s"],
            lines=[
                DiscussionLine(
                    line_id=ln["line_id"], speaker=ln["speaker"],
                    tone=ln["tone"], text=ln["text"],
                    est_duration_s=ln["est_duration_s"],
                    offset_ms=ln["offset_ms"],
                )
                for ln in e["lines"]
            ],
        )
        for e in doc["entries"]
    ]
    return TimelineManifest(
        video_ref=doc["video_ref"], duration_ms=doc["duration_ms"],
        entries=entries, toggle_default=doc["toggle_default"],
        assets=doc["assets"], sample_rate=doc["sample_rate"],
        manifest_version=doc["manifest_version"],
    )
