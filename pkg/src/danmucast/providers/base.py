"""Capability names, request hashing, and the typed provider facade."""

from __future__ import annotations

import hashlib
import io
import json
import logging
import wave
from typing import Any

import numpy as np

from ..errors import DurationUnachievable, ProviderFailure

log = logging.getLogger(__name__)

# Capability identifiers double as URL path segments and cache directories.
TOPIC_MODEL = "topic_model"
DIALOGUE_REORDER = "dialogue_reorder"
VISUAL_DESCRIBE = "visual_describe"
SEGMENT_SPLIT = "segment_split"
EMBED = "embed"
CREATIVITY_RATE = "creativity_rate"
SENTIMENT = "sentiment"
LOGPROB = "logprob"
TTS = "tts"

CAPABILITIES = (
    TOPIC_MODEL, DIALOGUE_REORDER, VISUAL_DESCRIBE, SEGMENT_SPLIT,
    EMBED, CREATIVITY_RATE, SENTIMENT, LOGPROB, TTS,
)

TONES = ("Narrator", "V1", "V2", "V3")


def request_hash(payload: Any) -> str:
    """Hex digest of the canonical JSON serialization of a payload.

    Stable across runs and platforms for identical payloads.
    """
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Provider:
    """A backend that can serve capability requests.

    ``call`` returns a JSON-serializable value for every capability except
    ``tts``, which returns raw WAV bytes.
    """

    def call(self, capability: str, payload: Any) -> Any:
        raise NotImplementedError


def _decode_wav_bytes(data: bytes) -> tuple[np.ndarray, int]:
    with wave.open(io.BytesIO(data), "rb") as wf:
        rate = wf.getframerate()
        frames = wf.readframes(wf.getnframes())
    return np.frombuffer(frames, dtype="<i2"), rate


class ProviderSuite:
    """Typed access to all capabilities through one backend."""

    def __init__(self, provider: Provider):
        self._provider = provider

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("embed requires non-empty text")
        vec = np.asarray(self._provider.call(EMBED, {"text": text}), dtype=np.float64)
        return vec

    def rate_creativity(self, topic_text: str) -> int:
        if not topic_text:
            raise ValueError("rate_creativity requires non-empty text")
        rating = int(self._provider.call(CREATIVITY_RATE, {"text": topic_text}))
        if not 1 <= rating <= 10:
            log.warning("creativity rating %d out of range, clamping", rating)
            rating = min(10, max(1, rating))
        return rating

    def sentiment(self, comment_text: str) -> str:
        label = self._provider.call(SENTIMENT, {"text": comment_text})
        if label not in ("positive", "neutral", "negative"):
            raise ProviderFailure(f"bad sentiment label {label!r}")
        return label

    def logprob(self, context_before: str, candidate_text: str,
                context_after: str, lm_key: str = "") -> float:
        if not candidate_text:
            raise ValueError("logprob requires non-empty candidate text")
        # lm_key ties cached responses to the language-model fit corpus.
        value = self._provider.call(LOGPROB, {
            "before": context_before,
            "text": candidate_text,
            "after": context_after,
            "lm": lm_key,
        })
        return float(value)

    def tts(self, text: str, tone_id: str,
            target_duration_s: float) -> tuple[np.ndarray, int, float]:
        """Synthesize speech; returns ``(mono int16, sample_rate, duration_s)``.

        The actual duration must land in ``[target/1.2, target]`` (speech
        rate 1.1 to 1.2); anything else raises DurationUnachievable.
        """
        if tone_id not in TONES:
            raise ValueError(f"unknown tone {tone_id!r}")
        if target_duration_s <= 0:
            raise ValueError("target_duration_s must be positive")
        data = self._provider.call(TTS, {
            "text": text,
            "tone_id": tone_id,
            "target_duration_s": round(target_duration_s, 6),
        })
        samples, rate = _decode_wav_bytes(data)
        actual = len(samples) / rate
        lo, hi = target_duration_s / 1.2, target_duration_s / 1.0
        if not (lo - 1e-9 <= actual <= hi + 1e-9):
            raise DurationUnachievable(
                f"tts produced {actual:.3f}s for target {target_duration_s:.3f}s "
                f"(allowed [{lo:.3f}, {hi:.3f}])"
            )
        return samples, rate, actual

    # --- structured curation capabilities ---------------------------------

    def group_topics(self, comment_texts: list[str]) -> list[dict]:
        result = self._provider.call(TOPIC_MODEL, {"comments": comment_texts})
        for group in result:
            if not group.get("summary") or "indices" not in group:
                raise ProviderFailure(f"bad topic group {group!r}")
        return result

    def reorder_dialogue(self, items: list[dict]) -> list[int]:
        """Order comment items (``{text, time_ms, epoch}``) into a dialogue."""
        order = self._provider.call(DIALOGUE_REORDER, {"items": items})
        if sorted(order) != list(range(len(items))):
            raise ProviderFailure(f"reorder returned invalid permutation {order!r}")
        return [int(i) for i in order]

    def describe_visual(self, topic_text: str,
                        caption_hints: list[str | None]) -> str | None:
        result = self._provider.call(VISUAL_DESCRIBE, {
            "topic_text": topic_text,
            "hints": caption_hints,
        })
        if result in (None, "None"):
            return None
        return str(result)

    def split_segment(self, sentences: list[str]) -> list[int]:
        """Propose split points; index i means a break after sentence i."""
        splits = self._provider.call(SEGMENT_SPLIT, {"sentences": sentences})
        return sorted(int(i) for i in splits)
