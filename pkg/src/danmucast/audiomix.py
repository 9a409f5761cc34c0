"""Audio rendering: per-line TTS assets, constant-power stereo panning,
the notification cue, and the preview mixdown.

Spatial layout: narrator at -60 degrees (left), viewers at +60 (right),
video at 0 (center), all at equal gain. Constant-power panning stands in
for device HRTF rendering. Output is fixed at 44100 Hz 16-bit stereo.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from .errors import AssetMissing, DurationUnachievable
from .ingest import write_wav
from .providers import ProviderSuite
from .timeline import AUTO_PLAY, LEFT, DiscussionLine, TimelineManifest

log = logging.getLogger(__name__)

SAMPLE_RATE = 44100
NARRATOR_AZIMUTH = -60.0
VIEWER_AZIMUTH = 60.0
VIDEO_AZIMUTH = 0.0
NOTIFICATION_MS = 500
PEAK_CEILING = 0.999


def azimuth_for(line: DiscussionLine) -> float:
    return NARRATOR_AZIMUTH if line.speaker == "Narrator" else VIEWER_AZIMUTH


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

def spatialize(mono: np.ndarray, azimuth_deg: float) -> np.ndarray:
    """Constant-power pan of a mono float signal to stereo.

    theta sweeps 0 (hard left) to pi/2 (hard right); total power is
    preserved for every azimuth.
    """
    theta = (azimuth_deg + 90.0) / 180.0 * (math.pi / 2.0)
    mono = np.asarray(mono, dtype=np.float64)
    return np.stack([math.cos(theta) * mono, math.sin(theta) * mono], axis=1)


def resample_linear(samples: np.ndarray, src_rate: int,
                    dst_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Linear-interpolation resampling of a mono float signal."""
    if src_rate == dst_rate or len(samples) == 0:
        return np.asarray(samples, dtype=np.float64)
    n_out = round(len(samples) * dst_rate / src_rate)
    src_t = np.arange(len(samples)) / src_rate
    dst_t = np.arange(n_out) / dst_rate
    return np.interp(dst_t, src_t, np.asarray(samples, dtype=np.float64))


def render_notification(notify_side: str) -> np.ndarray:
    """Half-second bubble cue: an exponentially decaying 800-1200 Hz sweep,
    panned toward the entry's notify side. Deterministic."""
    n = round(NOTIFICATION_MS / 1000 * SAMPLE_RATE)
    t = np.arange(n) / SAMPLE_RATE
    freq = 800.0 + 400.0 * (t / t[-1])
    phase = 2 * math.pi * np.cumsum(freq) / SAMPLE_RATE
    mono = 0.4 * np.exp(-6.0 * t) * np.sin(phase)
    azimuth = NARRATOR_AZIMUTH if notify_side == LEFT else VIEWER_AZIMUTH
    return spatialize(mono, azimuth)


# ---------------------------------------------------------------------------
# Line rendering
# ---------------------------------------------------------------------------

def render_line(line: DiscussionLine,
                providers: ProviderSuite) -> tuple[np.ndarray, int]:
    """Mono PCM for one discussion line via TTS.

    Duration lands in [est/1.2, est] (speech rate 1.1-1.2); if the backend
    cannot achieve it, the line degrades to silence of the estimated
    duration with a warning so the schedule stays stable.
    """
    try:
        samples, rate, _ = providers.tts(line.text, line.tone,
                                         line.est_duration_s)
        return samples, rate
    except DurationUnachievable as exc:
        log.warning("line %s: %s; substituting silence", line.line_id, exc)
        n = round(line.est_duration_s * SAMPLE_RATE)
        return np.zeros(n, dtype=np.int16), SAMPLE_RATE


def render_assets(manifest: TimelineManifest, providers: ProviderSuite,
                  out_dir: str | Path) -> dict[str, Path]:
    """Render every line to its WAV asset under ``out_dir``."""
    out_dir = Path(out_dir)
    (out_dir / "assets").mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    for entry in manifest.entries:
        for line in entry.lines:
            samples, rate = render_line(line, providers)
            path = out_dir / manifest.assets[line.line_id]
            write_wav(path, samples, rate)
            written[line.line_id] = path
    return written


# ---------------------------------------------------------------------------
# Mixdown
# ---------------------------------------------------------------------------

def _load_asset(path: Path) -> np.ndarray:
    from .ingest import read_wav  # local import to avoid a cycle at import time

    if not path.exists():
        raise AssetMissing(str(path))
    samples, rate = read_wav(path)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    mono = samples.astype(np.float64) / 32768.0
    return resample_linear(mono, rate)


def mixdown(
    manifest: TimelineManifest,
    video_audio: np.ndarray,
    video_rate: int,
    asset_dir: str | Path,
) -> np.ndarray:
    """Stereo preview: center-panned video audio plus scheduled discussion.

    Auto-play lines are summed at their video times; on-demand entries
    contribute only their notification cue (their playback happens in the
    player, off the video timeline). A final peak pass rescales only if
    the sum would clip. Output length equals the video duration.
    """
    video_audio = np.asarray(video_audio)
    if video_audio.ndim == 2:
        video_audio = video_audio.mean(axis=1)
    video = resample_linear(video_audio.astype(np.float64) / 32768.0, video_rate)
    n_total = max(len(video), round(manifest.duration_ms / 1000 * SAMPLE_RATE))

    mix = np.zeros((n_total, 2))
    mix[: len(video)] += spatialize(video, VIDEO_AZIMUTH)

    asset_dir = Path(asset_dir)
    for entry in manifest.entries:
        if entry.kind == AUTO_PLAY:
            for line in entry.lines:
                mono = _load_asset(asset_dir / manifest.assets[line.line_id])
                start = round((entry.time_ms + line.offset_ms) / 1000 * SAMPLE_RATE)
                stop = min(start + len(mono), n_total)
                mix[start:stop] += spatialize(mono[: stop - start],
                                              azimuth_for(line))
        else:
            cue = render_notification(entry.notify_side)
            start = round(entry.time_ms / 1000 * SAMPLE_RATE)
            stop = min(start + len(cue), n_total)
            mix[start:stop] += cue[: stop - start]

    peak = float(np.max(np.abs(mix))) if mix.size else 0.0
    if peak > PEAK_CEILING:
        mix *= PEAK_CEILING / peak
    return mix


def to_int16(stereo: np.ndarray) -> np.ndarray:
    return np.round(np.clip(stereo, -1.0, 1.0) * 32767).astype(np.int16)


def write_preview(mix: np.ndarray, path: str | Path) -> None:
    write_wav(path, to_int16(mix), SAMPLE_RATE)
