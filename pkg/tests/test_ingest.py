import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from danmucast.errors import (
    AttributeArity,
    EmptyAudio,
    MalformedTimestamp,
    XmlSyntaxError,
)
from danmucast.ingest import (
    DanmuComment,
    compute_envelope,
    parse_danmu_xml,
    parse_transcript,
    serialize_danmu_xml,
)
from tests.conftest import sine_pcm


class TestParseTranscript:
    def test_single_cue(self):
        raw = "1\n00:00:01,010 --> 00:00:04,100\nHello, welcome to the video!"
        result = parse_transcript(raw)
        assert result == [parse_transcript(raw)[0]]
        cue = result[0]
        assert (cue.index, cue.start_ms, cue.end_ms) == (1, 1010, 4100)
        assert cue.text == "Hello, welcome to the video!"

    def test_empty_input_is_not_an_error(self):
        assert parse_transcript("") == []

    def test_start_not_before_end(self):
        raw = "1\n00:00:05,000 --> 00:00:04,000\nx"
        with pytest.raises(MalformedTimestamp):
            parse_transcript(raw)

    def test_multiline_text_joined_with_spaces(self):
        raw = "1\n00:00:01,000 --> 00:00:02,000\nline one\nline two"
        assert parse_transcript(raw)[0].text == "line one line two"

    def test_bad_timestamp_reports_line_number(self):
        raw = "1\n00:00:01 --> 00:00:02,000\nx"
        with pytest.raises(MalformedTimestamp) as exc_info:
            parse_transcript(raw)
        assert exc_info.value.line_no == 2

    def test_overlap_rejected(self):
        raw = ("1\n00:00:01,000 --> 00:00:05,000\na\n\n"
               "2\n00:00:04,000 --> 00:00:06,000\nb")
        from danmucast.errors import OverlapError
        with pytest.raises(OverlapError):
            parse_transcript(raw)

    def test_output_sorted_even_if_input_is_not(self):
        raw = ("2\n00:00:10,000 --> 00:00:11,000\nb\n\n"
               "1\n00:00:01,000 --> 00:00:02,000\na")
        result = parse_transcript(raw)
        assert [c.start_ms for c in result] == [1000, 10000]

    @given(st.lists(st.tuples(st.integers(0, 3000), st.integers(1, 2000)),
                    min_size=0, max_size=8))
    def test_property_sorted_and_non_overlapping(self, spans):
        cursor = 0
        blocks = []
        for i, (gap, length) in enumerate(spans):
            start = cursor + gap
            end = start + length
            cursor = end
            def fmt(ms):
                h, rem = divmod(ms, 3600000)
                m, rem = divmod(rem, 60000)
                s, milli = divmod(rem, 1000)
                return f"{h:02d}:{m:02d}:{s:02d},{milli:03d}"
            blocks.append(f"{i + 1}\n{fmt(start)} --> {fmt(end)}\ntext {i}")
        result = parse_transcript("\n\n".join(blocks))
        for prev, cur in zip(result, result[1:]):
            assert prev.start_ms <= cur.start_ms
            assert prev.end_ms <= cur.start_ms


class TestParseDanmuXml:
    def test_field_mapping(self):
        raw = ('<i><d p="12.5,1,25,16777215,1700000000,0,ab12cd34,99">'
               "Nice!</d></i>")
        (c,) = parse_danmu_xml(raw)
        assert c == DanmuComment(video_time_ms=12500, mode=1, color=16777215,
                                 post_epoch_s=1700000000, user_hash="ab12cd34",
                                 text="Nice!")

    def test_zero_comments(self):
        assert parse_danmu_xml("<i></i>") == []

    def test_attribute_arity(self):
        with pytest.raises(AttributeArity):
            parse_danmu_xml('<i><d p="1,2,3">x</d></i>')

    def test_malformed_xml(self):
        with pytest.raises(XmlSyntaxError):
            parse_danmu_xml("<i><d")

    def test_round_half_up(self):
        raw = '<i><d p="0.0005,1,25,0,1,0,h,1">x</d></i>'
        assert parse_danmu_xml(raw)[0].video_time_ms == 1

    def test_blank_text_dropped(self):
        raw = ('<i><d p="1,1,25,0,1,0,h,1">  </d>'
               '<d p="2,1,25,0,1,0,h,2">ok</d></i>')
        assert [c.text for c in parse_danmu_xml(raw)] == ["ok"]

    def test_sorted_with_deterministic_ties(self):
        raw = ('<i><d p="5,1,25,0,200,0,bb,1">late</d>'
               '<d p="5,1,25,0,100,0,aa,2">early</d>'
               '<d p="1,1,25,0,300,0,cc,3">first</d></i>')
        texts = [c.text for c in parse_danmu_xml(raw)]
        assert texts == ["first", "early", "late"]

    @given(st.lists(
        st.tuples(st.integers(0, 600000), st.integers(0, 3),
                  st.integers(0, 0xFFFFFF), st.integers(1, 2_000_000_000),
                  st.text(alphabet="0123456789abcdef", min_size=8, max_size=8),
                  st.text(alphabet=st.characters(
                      blacklist_categories=("Cs", "Cc")), min_size=1, max_size=20)
                  ).filter(lambda t: t[5].strip()),
        max_size=10))
    def test_round_trip(self, rows):
        comments = sorted(
            (DanmuComment(video_time_ms=t, mode=m, color=c, post_epoch_s=e,
                          user_hash=h, text=x.strip())
             for t, m, c, e, h, x in rows),
            key=lambda c: (c.video_time_ms, c.post_epoch_s, c.user_hash),
        )
        assert parse_danmu_xml(serialize_danmu_xml(comments)) == comments


class TestComputeEnvelope:
    def test_constant_full_scale(self):
        pcm = np.full(44100 * 2, 32767, dtype=np.int16)
        env = compute_envelope(pcm, 44100)
        assert all(abs(v - 1.0) < 1e-3 for v in env.rms)

    def test_all_zero(self):
        env = compute_envelope(np.zeros(44100, dtype=np.int16), 44100)
        assert all(v == 0.0 for v in env.rms)

    def test_sine_rms_matches_direct_summation_oracle(self):
        pcm = sine_pcm(440.0, 1.0)
        env = compute_envelope(pcm, 44100)
        assert abs(env.rms[0] - 1 / math.sqrt(2)) < 0.01
        # Independent oracle: direct summation over the first window.
        x = pcm.astype(np.float64) / 32768.0
        oracle = math.sqrt(sum(v * v for v in x[:44100]) / 44100)
        assert abs(env.rms[0] - oracle) < 1e-12

    def test_length_is_ceil_duration_over_hop(self):
        for n in (44100, 44100 + 1, 3 * 44100 // 2, 1000):
            env = compute_envelope(np.ones(n, dtype=np.int16), 44100)
            assert len(env.rms) == math.ceil(n / (0.25 * 44100))

    def test_empty_audio(self):
        with pytest.raises(EmptyAudio):
            compute_envelope(np.array([], dtype=np.int16), 44100)

    def test_stereo_downmix(self):
        left = np.full(44100, 1000, dtype=np.int16)
        right = np.full(44100, 3000, dtype=np.int16)
        env = compute_envelope(np.stack([left, right], axis=1), 44100)
        assert abs(env.rms[0] - 2000 / 32768.0) < 1e-9
