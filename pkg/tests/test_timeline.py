import json
import random

import pytest

from danmucast.curation import Topic
from danmucast.errors import CapacityViolation
from danmucast.ingest import DanmuComment, TimedSentence
from danmucast.optimizer import Assignment
from danmucast.segmentation import (
    NON_SPEECH_GAP,
    SPEECH,
    SPEECH_BREAK_POINT,
    InsertionPoint,
    Segment,
    SpeechBreak,
)
from danmucast.timeline import (
    AUTO_PLAY,
    LEFT,
    NARRATOR_TONE,
    ON_DEMAND,
    RIGHT,
    VIEWER_TONES,
    build_script,
    build_timeline,
    manifest_from_json,
    manifest_to_json,
    rewind_target,
    schedule_autoplay,
    schedule_ondemand,
)
from danmucast.words import WORD_MODE_WHITESPACE


def comment(text, time_ms=1000):
    return DanmuComment(video_time_ms=time_ms, mode=1, color=0,
                        post_epoch_s=1, user_hash="u", text=text)


def topic(tid, texts, description=None):
    return Topic(id=tid, segment_id=0, summary=f"t{tid}",
                 comments=[comment(t) for t in texts],
                 visual_description=description)


def gap_point(pid=0, time_ms=8000, capacity_s=10.0):
    return InsertionPoint(id=pid, kind=NON_SPEECH_GAP, time_ms=time_ms,
                          capacity_s=capacity_s)


def break_point(pid=0, time_ms=5000):
    return InsertionPoint(id=pid, kind=SPEECH_BREAK_POINT, time_ms=time_ms,
                          capacity_s=10.0)


class TestBuildScript:
    def test_narrator_leads_when_description_exists(self):
        lines = build_script(topic(0, ["nice"], description="A man waves."),
                             random.Random(0), word_mode=WORD_MODE_WHITESPACE)
        assert lines[0].speaker == "Narrator"
        assert lines[0].tone == NARRATOR_TONE
        assert lines[1].speaker == "Viewer"

    def test_no_description_all_viewers(self):
        lines = build_script(topic(0, ["a", "b"]), random.Random(0),
                             word_mode=WORD_MODE_WHITESPACE)
        assert all(l.speaker == "Viewer" for l in lines)

    def test_no_adjacent_equal_tones_scan(self):
        # 100 comments: exhaustively scan every adjacent pair.
        lines = build_script(topic(0, [f"comment {i}" for i in range(100)],
                                   description="An opening scene."),
                             random.Random(42), word_mode=WORD_MODE_WHITESPACE)
        assert len(lines) == 101
        for a, b in zip(lines, lines[1:]):
            assert a.tone != b.tone
        assert all(l.tone in VIEWER_TONES for l in lines[1:])

    def test_respects_incoming_previous_tone(self):
        for seed in range(20):
            rng = random.Random(seed)
            lines = build_script(topic(0, ["x"]), rng, prev_tone="V2",
                                 word_mode=WORD_MODE_WHITESPACE)
            assert lines[0].tone != "V2"

    def test_duration_from_word_count(self):
        lines = build_script(topic(0, ["three words here"]), random.Random(0),
                             word_mode=WORD_MODE_WHITESPACE, words_per_s=3.0)
        assert lines[0].est_duration_s == pytest.approx(1.0)


class TestScheduleAutoplay:
    def test_sequential_offsets(self):
        a = Assignment(placements={0: 0, 1: 0}, objective=0.0,
                       per_point_order={0: [0, 1]})
        topics = [topic(0, ["two words", "four words in here"]),
                  topic(1, ["three more words"])]
        manifest = build_timeline(a, topics, [gap_point()], [], [], [],
                                  "v.wav", 20000,
                                  word_mode=WORD_MODE_WHITESPACE)
        (entry,) = manifest.entries
        assert entry.kind == AUTO_PLAY
        assert entry.time_ms == 8000
        offsets = [l.offset_ms for l in entry.lines]
        # 2, 4, 3 words at 3 w/s -> 667, 1333, 1000 ms
        assert offsets == [0, 667, 2000]
        assert [l.line_id for l in entry.lines] == [
            "p0_t0_l0", "p0_t0_l1", "p0_t1_l0"]

    def test_empty_point_omitted(self):
        assert schedule_autoplay(gap_point(), []) is None

    def test_capacity_violation_rejected(self):
        lines = build_script(topic(0, [" ".join(["w"] * 40)]), random.Random(0),
                             word_mode=WORD_MODE_WHITESPACE)
        with pytest.raises(CapacityViolation):
            schedule_autoplay(gap_point(capacity_s=2.0), lines)


class TestRewindTarget:
    # One speech segment [12000, 60000] with sentences; breaks at 30500
    # and 42000.
    SENTENCES = [
        TimedSentence(index=1, start_ms=12300, end_ms=20000, text="a"),
        TimedSentence(index=2, start_ms=20500, end_ms=30500, text="b"),
        TimedSentence(index=3, start_ms=30800, end_ms=41000, text="c"),
        TimedSentence(index=4, start_ms=41500, end_ms=42000, text="d"),
        TimedSentence(index=5, start_ms=42400, end_ms=60000, text="e"),
    ]
    SEGMENTS = [Segment(id=0, kind=SPEECH, start_ms=12000, end_ms=60000,
                        sentence_ids=(1, 2, 3, 4, 5))]
    BREAKS = [
        SpeechBreak(id=0, time_ms=30500, preceding_sentence_id=2,
                    following_sentence_id=3),
        SpeechBreak(id=1, time_ms=42000, preceding_sentence_id=4,
                    following_sentence_id=5),
    ]

    def test_after_previous_break(self):
        assert rewind_target(self.BREAKS[1], self.BREAKS, self.SEGMENTS,
                             self.SENTENCES) == 30800

    def test_first_break_rewinds_to_segment_first_sentence(self):
        assert rewind_target(self.BREAKS[0], self.BREAKS, self.SEGMENTS,
                             self.SENTENCES) == 12300


class TestScheduleOndemand:
    def _entry(self, description):
        lines = build_script(topic(0, ["hey"], description=description),
                             random.Random(0), word_mode=WORD_MODE_WHITESPACE)
        return schedule_ondemand(
            break_point(time_ms=30500), lines,
            TestRewindTarget.BREAKS[0], TestRewindTarget.BREAKS,
            TestRewindTarget.SEGMENTS, TestRewindTarget.SENTENCES)

    def test_left_when_narrator_first(self):
        entry = self._entry("A man waves.")
        assert entry.kind == ON_DEMAND
        assert entry.notify_side == LEFT
        assert entry.rewind_target_ms == 12300
        assert entry.response_window_s == 5

    def test_right_when_viewer_first(self):
        assert self._entry(None).notify_side == RIGHT

    def test_empty_omitted(self):
        entry = schedule_ondemand(break_point(), [],
                                  TestRewindTarget.BREAKS[0],
                                  TestRewindTarget.BREAKS,
                                  TestRewindTarget.SEGMENTS,
                                  TestRewindTarget.SENTENCES)
        assert entry is None


class TestManifest:
    def _manifest(self, seed=0):
        a = Assignment(placements={0: 0}, objective=0.0,
                       per_point_order={0: [0]})
        return build_timeline(
            a, [topic(0, ["first remark", "second remark"],
                      description="A short scene.")],
            [gap_point()], [], [], [], "video.wav", 20000, seed=seed,
            word_mode=WORD_MODE_WHITESPACE)

    def test_round_trip(self):
        m = self._manifest()
        text = manifest_to_json(m)
        back = manifest_from_json(text)
        assert manifest_to_json(back) == text

    def test_byte_determinism_same_seed(self):
        assert manifest_to_json(self._manifest(5)) == \
            manifest_to_json(self._manifest(5))

    def test_sorted_keys_and_schema(self):
        doc = json.loads(manifest_to_json(self._manifest()))
        assert doc["manifest_version"] == 1
        assert doc["toggle_default"] == "on"
        assert doc["sample_rate"] == 44100
        assert doc["assets"] == {
            "p0_t0_l0": "assets/p0_t0_l0.wav",
            "p0_t0_l1": "assets/p0_t0_l1.wav",
            "p0_t0_l2": "assets/p0_t0_l2.wav",
        }
        dumped = manifest_to_json(self._manifest())
        assert dumped == json.dumps(doc, indent=2, sort_keys=True,
                                    ensure_ascii=False)

    def test_entries_sorted_by_time(self):
        a = Assignment(placements={0: 1, 1: 0}, objective=0.0,
                       per_point_order={1: [0], 0: [1]})
        topics = [topic(0, ["one"]), topic(1, ["two"])]
        points = [gap_point(pid=0, time_ms=9000), gap_point(pid=1, time_ms=3000)]
        m = build_timeline(a, topics, points, [], [], [], "v.wav", 20000,
                           word_mode=WORD_MODE_WHITESPACE)
        assert [e.time_ms for e in m.entries] == [3000, 9000]
