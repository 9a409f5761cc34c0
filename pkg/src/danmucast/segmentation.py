"""Timeline partitioning: speech/non-speech segments, high-volume
exclusion, speech-break detection, and insertion-point construction.

The speech/non-speech split is driven entirely by transcript timing: any
inter-sentence gap longer than two seconds becomes a non-speech segment
(leading and trailing gaps included). Speech segments absorb sub-2 s gaps
so the segment list tiles ``[0, duration]`` exactly, which downstream
comment assignment relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DurationMismatch
from .ingest import TimedSentence, VolumeEnvelope
from .providers import ProviderSuite
from .words import WORD_MODE_CJK, count_words

GAP_THRESHOLD_MS = 2000        # inter-sentence silence that opens a gap
MIN_INTERVAL_MS = 500          # unusable insertable slivers are dropped
MIN_CHUNK_WORDS = 20           # minimum words per speech chunk
BREAK_CAPACITY_S = 10.0        # pause budget at a speech break

SPEECH = "Speech"
NON_SPEECH = "NonSpeech"
NON_SPEECH_GAP = "NonSpeechGap"
SPEECH_BREAK_POINT = "SpeechBreakPoint"


@dataclass(frozen=True)
class Segment:
    id: int
    kind: str  # SPEECH or NON_SPEECH
    start_ms: int
    end_ms: int
    sentence_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class SpeechBreak:
    """A pause point between relatively independent speech paragraphs."""

    id: int
    time_ms: int
    preceding_sentence_id: int
    following_sentence_id: int


@dataclass(frozen=True)
class InsertionPoint:
    """A slot where discussion audio can go, with a capacity in seconds."""

    id: int
    kind: str  # NON_SPEECH_GAP or SPEECH_BREAK_POINT
    time_ms: int
    capacity_s: float
    context_before: str = ""
    context_after: str = ""
    end_ms: int | None = None  # insertable interval end (gaps only)


@dataclass
class SegmentationResult:
    segments: list[Segment]
    breaks: list[SpeechBreak] = field(default_factory=list)
    insertable_intervals: list[tuple[int, int]] = field(default_factory=list)
    points: list[InsertionPoint] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------

def find_segments(
    sentences: list[TimedSentence],
    duration_ms: int,
    gap_threshold_ms: int = GAP_THRESHOLD_MS,
) -> list[Segment]:
    """Partition ``[0, duration]`` into speech and non-speech segments.

    Gaps strictly longer than the threshold become non-speech; everything
    else is speech. A video without sentences is one non-speech segment.
    """
    if sentences and sentences[-1].end_ms > duration_ms:
        raise DurationMismatch(
            f"transcript ends at {sentences[-1].end_ms} ms, "
            f"video duration is {duration_ms} ms"
        )
    if not sentences:
        return [Segment(id=0, kind=NON_SPEECH, start_ms=0, end_ms=duration_ms)]

    # Group sentences into runs split at gaps > threshold.
    runs: list[list[TimedSentence]] = [[sentences[0]]]
    for prev, cur in zip(sentences, sentences[1:]):
        if cur.start_ms - prev.end_ms > gap_threshold_ms:
            runs.append([cur])
        else:
            runs[-1].append(cur)

    # Emit boundaries; speech runs absorb sub-threshold edge slack so the
    # segments tile the timeline with no uncovered time.
    segments: list[Segment] = []
    cursor = 0
    for run in runs:
        run_start, run_end = run[0].start_ms, run[-1].end_ms
        if run_start - cursor > gap_threshold_ms:
            segments.append(Segment(id=0, kind=NON_SPEECH,
                                    start_ms=cursor, end_ms=run_start))
            cursor = run_start
        segments.append(Segment(
            id=0, kind=SPEECH, start_ms=cursor, end_ms=run_end,
            sentence_ids=tuple(s.index for s in run),
        ))
        cursor = run_end
    if duration_ms - cursor > gap_threshold_ms:
        segments.append(Segment(id=0, kind=NON_SPEECH,
                                start_ms=cursor, end_ms=duration_ms))
    elif duration_ms > cursor:
        last = segments[-1]
        segments[-1] = Segment(id=last.id, kind=last.kind, start_ms=last.start_ms,
                               end_ms=duration_ms, sentence_ids=last.sentence_ids)

    return [Segment(id=i, kind=s.kind, start_ms=s.start_ms, end_ms=s.end_ms,
                    sentence_ids=s.sentence_ids) for i, s in enumerate(segments)]


# ---------------------------------------------------------------------------
# High-volume exclusion
# ---------------------------------------------------------------------------

def exclude_high_volume(
    segment: Segment,
    envelope: VolumeEnvelope,
    threshold: float = 0.8,
    min_interval_ms: int = MIN_INTERVAL_MS,
) -> list[tuple[int, int]]:
    """Insertable sub-intervals of a non-speech segment.

    Every envelope window whose RMS exceeds the threshold is subtracted
    from the segment; leftover pieces shorter than ``min_interval_ms`` are
    unusable and dropped.
    """
    if segment.kind != NON_SPEECH:
        raise ValueError("exclude_high_volume expects a non-speech segment")

    hop_ms = round(envelope.hop_s * 1000)
    win_ms = round(envelope.window_s * 1000)
    excluded: list[tuple[int, int]] = []
    for k, value in enumerate(envelope.rms):
        if value > threshold:
            excluded.append((k * hop_ms, k * hop_ms + win_ms))

    intervals = [(segment.start_ms, segment.end_ms)]
    for ex_start, ex_end in excluded:
        next_intervals = []
        for start, end in intervals:
            if ex_end <= start or ex_start >= end:
                next_intervals.append((start, end))
                continue
            if start < ex_start:
                next_intervals.append((start, ex_start))
            if ex_end < end:
                next_intervals.append((ex_end, end))
        intervals = next_intervals

    return [(s, e) for s, e in intervals if e - s >= min_interval_ms]


# ---------------------------------------------------------------------------
# Speech breaks
# ---------------------------------------------------------------------------

def detect_breaks(
    speech_segment: Segment,
    sentences: list[TimedSentence],
    providers: ProviderSuite,
    word_mode: str = WORD_MODE_CJK,
    min_chunk_words: int = MIN_CHUNK_WORDS,
) -> list[SpeechBreak]:
    """Split a speech segment into chunks and emit breaks between them.

    The provider proposes split points at sentence boundaries; chunks
    shorter than the word minimum are merged forward (the trailing short
    chunk merges backward). The segment's own end never becomes a break:
    it abuts a non-speech segment or the end of the video.
    """
    if speech_segment.kind != SPEECH:
        raise ValueError("detect_breaks expects a speech segment")
    by_id = {s.index: s for s in sentences}
    seg_sentences = [by_id[i] for i in speech_segment.sentence_ids]
    total_words = sum(count_words(s.text, word_mode) for s in seg_sentences)
    if total_words < min_chunk_words:
        return []  # too short for even one break-terminated chunk

    splits = providers.split_segment([s.text for s in seg_sentences])

    # Chunks as half-open sentence ranges delimited by the proposed splits.
    bounds = [i for i in splits if 0 <= i < len(seg_sentences) - 1]
    chunks: list[list[TimedSentence]] = []
    start = 0
    for b in bounds:
        chunks.append(seg_sentences[start: b + 1])
        start = b + 1
    chunks.append(seg_sentences[start:])

    def words_of(chunk: list[TimedSentence]) -> int:
        return sum(count_words(s.text, word_mode) for s in chunk)

    # Merge-forward repair: every chunk that will end in a break needs the
    # word minimum. The trailing chunk ends at the segment boundary, which
    # is never a break, so it is exempt and simply closes the segment.
    merged: list[list[TimedSentence]] = []
    pending: list[TimedSentence] = []
    for chunk in chunks:
        pending.extend(chunk)
        if words_of(pending) >= min_chunk_words:
            merged.append(pending)
            pending = []
    if pending:
        merged.append(pending)

    breaks = []
    for chunk, nxt in zip(merged, merged[1:]):
        breaks.append(SpeechBreak(
            id=0,
            time_ms=chunk[-1].end_ms,
            preceding_sentence_id=chunk[-1].index,
            following_sentence_id=nxt[0].index,
        ))
    return breaks


# ---------------------------------------------------------------------------
# Insertion points
# ---------------------------------------------------------------------------

def build_insertion_points(
    sentences: list[TimedSentence],
    breaks: list[SpeechBreak],
    insertable_intervals: list[tuple[int, int]],
    break_capacity_s: float = BREAK_CAPACITY_S,
) -> list[InsertionPoint]:
    """Capacity-annotated insertion points, sorted by time.

    Non-speech gap capacity is the insertable interval length (not clamped);
    speech breaks carry the fixed pause budget.
    """
    def context(time_ms: int) -> tuple[str, str]:
        before = ""
        after = ""
        for s in sentences:
            if s.end_ms <= time_ms:
                before = s.text
            if s.start_ms >= time_ms and not after:
                after = s.text
        return before, after

    raw: list[InsertionPoint] = []
    for start, end in insertable_intervals:
        cb, ca = context(start)
        raw.append(InsertionPoint(
            id=0, kind=NON_SPEECH_GAP, time_ms=start,
            capacity_s=(end - start) / 1000.0,
            context_before=cb, context_after=ca, end_ms=end,
        ))
    for brk in breaks:
        cb, ca = context(brk.time_ms)
        raw.append(InsertionPoint(
            id=0, kind=SPEECH_BREAK_POINT, time_ms=brk.time_ms,
            capacity_s=break_capacity_s,
            context_before=cb, context_after=ca,
        ))
    raw.sort(key=lambda p: (p.time_ms, p.kind))
    return [InsertionPoint(id=i, kind=p.kind, time_ms=p.time_ms,
                           capacity_s=p.capacity_s,
                           context_before=p.context_before,
                           context_after=p.context_after, end_ms=p.end_ms)
            for i, p in enumerate(raw)]


def segment_video(
    sentences: list[TimedSentence],
    duration_ms: int,
    envelope: VolumeEnvelope,
    providers: ProviderSuite,
    rms_threshold: float = 0.8,
    word_mode: str = WORD_MODE_CJK,
) -> SegmentationResult:
    """Full segmentation stage: segments, breaks, and insertion points."""
    segments = find_segments(sentences, duration_ms)
    intervals: list[tuple[int, int]] = []
    breaks: list[SpeechBreak] = []
    for seg in segments:
        if seg.kind == NON_SPEECH:
            intervals.extend(exclude_high_volume(seg, envelope, rms_threshold))
        else:
            breaks.extend(detect_breaks(seg, sentences, providers, word_mode))
    breaks = [SpeechBreak(id=i, time_ms=b.time_ms,
                          preceding_sentence_id=b.preceding_sentence_id,
                          following_sentence_id=b.following_sentence_id)
              for i, b in enumerate(breaks)]
    points = build_insertion_points(sentences, breaks, intervals)
    return SegmentationResult(segments=segments, breaks=breaks,
                              insertable_intervals=intervals, points=points)
