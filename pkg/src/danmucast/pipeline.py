"""Stage orchestration and flat JSON artifacts between stages.

Each stage reads its upstream artifact, does its work, and writes one
self-describing JSON document embedding the configuration hash. Mixing
artifacts produced under different configurations is refused.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import audiomix, curation, scoring, segmentation, timeline
from .errors import MissingStage, NoCandidates, StaleArtifact
from .ingest import (
    DanmuComment,
    TimedSentence,
    compute_envelope,
    parse_danmu_xml,
    parse_keyframes,
    parse_transcript,
    read_wav,
)
from .optimizer import (
    CandidateSet,
    Assignment,
    candidate_points,
    dump_instance,
    solve,
    validate_assignment,
)
from .providers import CachedProvider, OfflineEngine, ProviderSuite, RemoteProvider
from .scoring import ScoringConfig
from .segmentation import InsertionPoint, Segment, SpeechBreak
from .words import WORD_MODE_CJK

log = logging.getLogger(__name__)

SEGMENTS_FILE = "segments.json"
TOPICS_FILE = "topics.json"
ASSIGNMENT_FILE = "assignment.json"
MANIFEST_FILE = "manifest.json"
PREVIEW_FILE = "preview.wav"


@dataclass
class PipelineConfig:
    video_audio: str
    transcript: str
    danmu_xml: str
    keyframes: str
    out_dir: str
    provider_mode: str = "offline"          # "offline" or "remote"
    remote_url: str | None = None
    cache_dir: str | None = None
    seed: int = 0
    rms_threshold: float = 0.8
    word_mode: str = WORD_MODE_CJK
    scoring: ScoringConfig = field(default_factory=ScoringConfig)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "PipelineConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        scoring_doc = doc.pop("scoring", {})
        cfg = cls(**doc)
        if scoring_doc:
            cfg.scoring = replace(ScoringConfig(), **scoring_doc)
        for key, value in overrides.items():
            if value is not None:
                setattr(cfg, key, value)
        return cfg

    def config_hash(self) -> str:
        """Digest over parameters and input file contents.

        Output and cache locations are excluded: they do not change what
        a stage computes.
        """
        inputs = {}
        for name in ("video_audio", "transcript", "danmu_xml", "keyframes"):
            path = Path(getattr(self, name))
            inputs[name] = hashlib.sha256(path.read_bytes()).hexdigest()
        doc = {
            "inputs": inputs,
            "provider_mode": self.provider_mode,
            "remote_url": self.remote_url,
            "seed": self.seed,
            "rms_threshold": self.rms_threshold,
            "word_mode": self.word_mode,
            "scoring": asdict(self.scoring),
        }
        canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def build_providers(config: PipelineConfig) -> tuple[ProviderSuite, str]:
    """Provider suite plus the language-model cache key for this video."""
    corpus = " ".join(
        s.text for s in parse_transcript(
            Path(config.transcript).read_text(encoding="utf-8"))
    )
    lm_key = hashlib.sha256(corpus.encode()).hexdigest()[:12]
    if config.provider_mode == "remote":
        if not config.remote_url:
            raise ValueError("remote provider mode requires remote_url")
        backend = RemoteProvider(config.remote_url)
    else:
        backend = OfflineEngine(corpus)
    if config.cache_dir:
        backend = CachedProvider(backend, config.cache_dir)
    return ProviderSuite(backend), lm_key


# ---------------------------------------------------------------------------
# Artifact IO
# ---------------------------------------------------------------------------

def _write_artifact(config: PipelineConfig, name: str, doc: dict) -> Path:
    doc = {"config_hash": config.config_hash(), **doc}
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(json.dumps(doc, indent=2, sort_keys=True,
                               ensure_ascii=False), encoding="utf-8")
    return path


def _read_artifact(config: PipelineConfig, name: str, stage: str) -> dict:
    path = Path(config.out_dir) / name
    if not path.exists():
        raise MissingStage(
            f"{name} not found; run the '{stage}' stage first"
        )
    doc = json.loads(path.read_text(encoding="utf-8"))
    expected = config.config_hash()
    if doc.get("config_hash") != expected:
        raise StaleArtifact(
            f"{name} was produced under config {doc.get('config_hash')}, "
            f"current config is {expected}; re-run the '{stage}' stage"
        )
    return doc


def _sentence_to_dict(s: TimedSentence) -> dict:
    return {"index": s.index, "start_ms": s.start_ms, "end_ms": s.end_ms,
            "text": s.text}


def _comment_to_dict(c: DanmuComment) -> dict:
    return {"video_time_ms": c.video_time_ms, "mode": c.mode, "color": c.color,
            "post_epoch_s": c.post_epoch_s, "user_hash": c.user_hash,
            "text": c.text}


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def run_segment(config: PipelineConfig) -> Path:
    providers, _ = build_providers(config)
    sentences = parse_transcript(
        Path(config.transcript).read_text(encoding="utf-8"))
    samples, rate = read_wav(config.video_audio)
    duration_ms = round(len(samples) / rate * 1000)
    envelope = compute_envelope(samples, rate)
    result = segmentation.segment_video(
        sentences, duration_ms, envelope, providers,
        rms_threshold=config.rms_threshold, word_mode=config.word_mode,
    )
    return _write_artifact(config, SEGMENTS_FILE, {
        "duration_ms": duration_ms,
        "sentences": [_sentence_to_dict(s) for s in sentences],
        "segments": [asdict(s) for s in result.segments],
        "breaks": [asdict(b) for b in result.breaks],
        "insertable_intervals": [list(iv) for iv in result.insertable_intervals],
        "points": [asdict(p) for p in result.points],
    })


def _load_segments(config: PipelineConfig):
    doc = _read_artifact(config, SEGMENTS_FILE, "segment")
    sentences = [TimedSentence(**s) for s in doc["sentences"]]
    segments = [Segment(**{**s, "sentence_ids": tuple(s["sentence_ids"])})
                for s in doc["segments"]]
    breaks = [SpeechBreak(**b) for b in doc["breaks"]]
    points = [InsertionPoint(**p) for p in doc["points"]]
    return doc, sentences, segments, breaks, points


def run_curate(config: PipelineConfig) -> Path:
    providers, _ = build_providers(config)
    _, _, segments, _, _ = _load_segments(config)
    comments = parse_danmu_xml(Path(config.danmu_xml).read_text(encoding="utf-8"))
    keyframes = parse_keyframes(Path(config.keyframes).read_text(encoding="utf-8"))

    assigned = curation.assign_comments(comments, segments)
    topics: list[curation.Topic] = []
    untopiced_total = 0
    for segment in segments:
        seg_topics, untopiced = curation.curate_segment(
            segment, assigned[segment.id], keyframes, providers,
            next_topic_id=len(topics), word_mode=config.word_mode,
            words_per_s=config.scoring.words_per_s,
        )
        topics.extend(seg_topics)
        untopiced_total += untopiced

    return _write_artifact(config, TOPICS_FILE, {
        "untopiced": untopiced_total,
        "topics": [
            {
                "id": t.id,
                "segment_id": t.segment_id,
                "summary": t.summary,
                "visual_description": t.visual_description,
                "length_s": t.length_s,
                "comments": [_comment_to_dict(c) for c in t.comments],
            }
            for t in topics
        ],
    })


def _load_topics(config: PipelineConfig) -> list[curation.Topic]:
    doc = _read_artifact(config, TOPICS_FILE, "curate")
    return [
        curation.Topic(
            id=t["id"], segment_id=t["segment_id"], summary=t["summary"],
            comments=[DanmuComment(**c) for c in t["comments"]],
            visual_description=t["visual_description"], length_s=t["length_s"],
        )
        for t in doc["topics"]
    ]


def run_plan(config: PipelineConfig) -> tuple[Path, Path]:
    providers, lm_key = build_providers(config)
    seg_doc, sentences, segments, breaks, points = _load_segments(config)
    topics = _load_topics(config)

    segments_by_id = {s.id: s for s in segments}
    kept: list[curation.Topic] = []
    candidates: dict[int, CandidateSet] = {}
    iq: dict[tuple[int, int], float] = {}
    for topic in topics:
        segment = segments_by_id[topic.segment_id]
        transcript = scoring.segment_transcript_text(segment, sentences)
        topic.scores = scoring.topic_quality(topic, transcript, providers,
                                             config.scoring)
        mid = (segment.start_ms + segment.end_ms) // 2
        try:
            cand = candidate_points(topic, mid, points)
        except NoCandidates:
            log.warning("topic %d discarded: no candidate points", topic.id)
            continue
        cand_points = [p for p in points if p.id in cand.point_ids]
        for score in scoring.insertion_scores(topic, cand_points, providers,
                                              config.scoring, lm_key):
            iq[(topic.id, score.point_id)] = score.iq
        candidates[topic.id] = cand
        kept.append(topic)

    assignment = solve(kept, points, candidates, iq,
                       config.scoring.objective_weight)
    validate_assignment(assignment, kept, points, candidates)

    assignment_path = _write_artifact(config, ASSIGNMENT_FILE, {
        "instance": json.loads(dump_instance(kept, points, candidates, iq,
                                             assignment)),
    })

    manifest = timeline.build_timeline(
        assignment, kept, points, breaks, segments, sentences,
        video_ref=Path(config.video_audio).name,
        duration_ms=seg_doc["duration_ms"], seed=config.seed,
        word_mode=config.word_mode, words_per_s=config.scoring.words_per_s,
    )
    manifest_doc = json.loads(timeline.manifest_to_json(manifest))
    manifest_path = _write_artifact(config, MANIFEST_FILE, manifest_doc)
    return assignment_path, manifest_path


def run_render(config: PipelineConfig) -> Path:
    providers, _ = build_providers(config)
    doc = _read_artifact(config, MANIFEST_FILE, "plan")
    doc.pop("config_hash", None)
    manifest = timeline.manifest_from_json(json.dumps(doc))
    out_dir = Path(config.out_dir)
    audiomix.render_assets(manifest, providers, out_dir)
    samples, rate = read_wav(config.video_audio)
    mix = audiomix.mixdown(manifest, samples, rate, out_dir)
    preview = out_dir / PREVIEW_FILE
    audiomix.write_preview(mix, preview)
    return preview


def run_all(config: PipelineConfig) -> Path:
    run_segment(config)
    run_curate(config)
    run_plan(config)
    return run_render(config)
