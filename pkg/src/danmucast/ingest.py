"""Input parsing: transcript, Danmu XML, keyframe index, audio envelope.

All pipeline times are integer milliseconds. Functions here are pure and
thread-safe; they validate eagerly and raise the exceptions declared in
:mod:`danmucast.errors` rather than returning partial results.
"""

from __future__ import annotations

import json
import math
import re
import wave
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import (
    AttributeArity,
    EmptyAudio,
    MalformedTimestamp,
    NumericField,
    OverlapError,
    XmlSyntaxError,
)

FULL_SCALE = 32768.0  # 16-bit PCM full scale used for RMS normalization


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimedSentence:
    """One transcript sentence with millisecond bounds."""

    index: int
    start_ms: int
    end_ms: int
    text: str


@dataclass(frozen=True)
class DanmuComment:
    """A single time-synced comment.

    ``video_time_ms`` is the position on the video timeline; ``post_epoch_s``
    is the wall-clock posting time used only for deterministic tie-breaks.
    """

    video_time_ms: int
    mode: int
    color: int
    post_epoch_s: int
    user_hash: str
    text: str


@dataclass(frozen=True)
class KeyframeRef:
    """Pointer to a pre-extracted keyframe; extraction happens upstream."""

    time_ms: int
    image_path: str
    caption_hint: str | None = None


@dataclass(frozen=True)
class VolumeEnvelope:
    """Sliding-window RMS of the video audio, full-scale normalized.

    Window k covers ``[k * hop_s, k * hop_s + window_s)`` seconds.
    """

    window_s: float
    hop_s: float
    rms: tuple[float, ...]


# ---------------------------------------------------------------------------
# SubRip transcript
# ---------------------------------------------------------------------------

_TS_RE = re.compile(r"^(\d{1,2}):([0-5]\d):([0-5]\d),(\d{3})$")
_ARROW = "-->"


def _parse_ts(token: str, line_no: int) -> int:
    m = _TS_RE.match(token.strip())
    if not m:
        raise MalformedTimestamp(f"bad timestamp {token!r}", line_no)
    hh, mm, ss, ms = (int(g) for g in m.groups())
    return ((hh * 60 + mm) * 60 + ss) * 1000 + ms


def parse_transcript(raw: str) -> list[TimedSentence]:
    """Parse SubRip text into sorted, non-overlapping sentences.

    Multi-line cue text is joined with single spaces. An empty input is not
    an error and yields an empty list.
    """
    sentences: list[TimedSentence] = []
    lines = raw.split("\n")
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        index_line = lines[i].strip()
        try:
            index = int(index_line)
        except ValueError:
            raise MalformedTimestamp(f"expected cue index, got {index_line!r}", i + 1)
        i += 1
        if i >= len(lines) or _ARROW not in lines[i]:
            raise MalformedTimestamp("missing timing line", i + 1)
        left, _, right = lines[i].partition(_ARROW)
        start_ms = _parse_ts(left, i + 1)
        end_ms = _parse_ts(right, i + 1)
        if start_ms >= end_ms:
            raise MalformedTimestamp(
                f"start {start_ms} ms is not before end {end_ms} ms", i + 1
            )
        i += 1
        text_lines: list[str] = []
        while i < len(lines) and lines[i].strip():
            text_lines.append(lines[i].strip())
            i += 1
        sentences.append(
            TimedSentence(index=index, start_ms=start_ms, end_ms=end_ms,
                          text=" ".join(text_lines))
        )

    sentences.sort(key=lambda s: s.start_ms)
    for prev, cur in zip(sentences, sentences[1:]):
        if cur.start_ms < prev.end_ms:
            raise OverlapError(
                f"cue {cur.index} starting {cur.start_ms} ms overlaps "
                f"cue {prev.index} ending {prev.end_ms} ms"
            )
    return sentences


# ---------------------------------------------------------------------------
# Danmu XML
# ---------------------------------------------------------------------------

def _seconds_to_ms(token: str) -> int:
    # Round half up; binary floats would round 0.5 cases unpredictably.
    try:
        return int((Decimal(token) * 1000).to_integral_value(rounding=ROUND_HALF_UP))
    except InvalidOperation as exc:
        raise NumericField(f"bad time field {token!r}") from exc


def parse_danmu_xml(raw: str) -> list[DanmuComment]:
    """Parse Bilibili-style ``<d p="...">text</d>`` comment XML.

    Comments are sorted by video time (ties: post epoch, then user hash);
    blank-text comments are dropped.
    """
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        raise XmlSyntaxError(str(exc)) from exc

    comments: list[DanmuComment] = []
    for idx, el in enumerate(root.iter("d")):
        p = el.get("p", "")
        fields = p.split(",")
        if len(fields) < 8:
            raise AttributeArity(f"p attribute has {len(fields)} fields, need 8", idx)
        text = (el.text or "").strip()
        if not text:
            continue
        try:
            mode = int(fields[1])
            color = int(fields[3])
            epoch = int(fields[4])
        except ValueError as exc:
            raise NumericField(f"element {idx}: {exc}") from exc
        comments.append(
            DanmuComment(
                video_time_ms=_seconds_to_ms(fields[0]),
                mode=mode,
                color=color,
                post_epoch_s=epoch,
                user_hash=fields[6],
                text=text,
            )
        )
    comments.sort(key=lambda c: (c.video_time_ms, c.post_epoch_s, c.user_hash))
    return comments


def serialize_danmu_xml(comments: list[DanmuComment]) -> str:
    """Render comments back to the XML input format (round-trip safe)."""
    parts = ["<?xml version=\"1.0\" encoding=\"UTF-8\"?><i>"]
    for i, c in enumerate(comments):
        secs = f"{c.video_time_ms / 1000:.3f}".rstrip("0").rstrip(".")
        p = f"{secs},{c.mode},25,{c.color},{c.post_epoch_s},0,{c.user_hash},{i}"
        parts.append(f'<d p="{p}">{escape(c.text)}</d>')
    parts.append("</i>")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Keyframe index
# ---------------------------------------------------------------------------

def parse_keyframes(raw: str) -> list[KeyframeRef]:
    """Parse a JSON array of ``{time_ms, image_path, caption_hint?}``."""
    data = json.loads(raw)
    frames = [
        KeyframeRef(
            time_ms=int(item["time_ms"]),
            image_path=str(item["image_path"]),
            caption_hint=item.get("caption_hint"),
        )
        for item in data
    ]
    for prev, cur in zip(frames, frames[1:]):
        if cur.time_ms <= prev.time_ms:
            raise ValueError(
                f"keyframe times must be strictly increasing "
                f"({prev.time_ms} then {cur.time_ms})"
            )
    return frames


# ---------------------------------------------------------------------------
# Audio
# ---------------------------------------------------------------------------

def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a 16-bit PCM RIFF WAVE file.

    Returns ``(samples, sample_rate)`` where samples has shape ``(n,)`` for
    mono or ``(n, channels)`` otherwise, dtype int16.
    """
    with wave.open(str(path), "rb") as wf:
        if wf.getsampwidth() != 2:
            raise ValueError(f"expected 16-bit PCM, got {wf.getsampwidth() * 8}-bit")
        n_channels = wf.getnchannels()
        rate = wf.getframerate()
        frames = wf.readframes(wf.getnframes())
    samples = np.frombuffer(frames, dtype="<i2")
    if n_channels > 1:
        samples = samples.reshape(-1, n_channels)
    return samples, rate


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int) -> None:
    """Write int16 samples (mono ``(n,)`` or interleaved ``(n, ch)``) as WAV."""
    samples = np.asarray(samples, dtype="<i2")
    n_channels = 1 if samples.ndim == 1 else samples.shape[1]
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(n_channels)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(samples.tobytes())


def compute_envelope(
    pcm: np.ndarray,
    sample_rate: int,
    window_s: float = 1.0,
    hop_s: float = 0.25,
) -> VolumeEnvelope:
    """Sliding-window RMS over full-scale-normalized samples.

    Stereo input is downmixed by channel averaging. Tail windows shorter
    than ``window_s`` are computed over the available samples.
    """
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    pcm = np.asarray(pcm)
    if pcm.size == 0:
        raise EmptyAudio("audio input has zero samples")
    if pcm.ndim == 2:
        pcm = pcm.mean(axis=1)
    x = pcm.astype(np.float64) / FULL_SCALE

    win = int(round(window_s * sample_rate))
    hop = int(round(hop_s * sample_rate))
    n_windows = math.ceil(len(x) / hop)
    rms = []
    for k in range(n_windows):
        chunk = x[k * hop: k * hop + win]
        rms.append(float(np.sqrt(np.mean(chunk * chunk))))
    return VolumeEnvelope(window_s=window_s, hop_s=hop_s, rms=tuple(rms))
