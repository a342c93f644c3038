"""Word attribution, stream flattening, and turn grouping."""

import numpy as np
import pytest

from turnkit.align import AlignConfig, align, attribute_words, flatten_stream, group_turns
from turnkit.errors import PreconditionError, ValidationError
from turnkit.types import TIME_EPS, AttributedWord, SpeakerSegment, Word

from generators import random_segments, random_words
from oracles import brute_force_attribution


def _word(text, start, end):
    return Word(text=text, start=start, end=end)


def _seg(start, end, speaker):
    return SpeakerSegment(start=start, end=end, speaker=speaker)


class TestAlignConfig:
    def test_defaults(self):
        config = AlignConfig()
        assert config.pause_threshold == 1.5
        assert config.rescue_window == 0.5
        assert config.drop_unattributed

    def test_rejects_non_positive_pause(self):
        with pytest.raises(ValidationError, match="pause_threshold"):
            AlignConfig(pause_threshold=0.0)

    def test_rejects_negative_rescue_window(self):
        with pytest.raises(ValidationError, match="rescue_window"):
            AlignConfig(rescue_window=-0.1)


class TestAttributeWords:
    def test_maximal_overlap_wins(self):
        segments = [_seg(0.0, 2.0, "A"), _seg(1.0, 5.0, "B")]
        (aw,) = attribute_words([_word("x", 1.5, 4.0)], segments)
        assert aw.speaker == "B"
        assert aw.overlap == pytest.approx(2.5)
        assert not aw.rescued

    def test_tie_prefers_earlier_segment_start(self):
        segments = [_seg(5.0, 8.0, "B"), _seg(0.0, 10.0, "A")]
        (aw,) = attribute_words([_word("x", 6.0, 7.0)], segments)
        assert aw.speaker == "A"

    def test_tie_prefers_smaller_speaker_id(self):
        segments = [_seg(2.0, 6.0, "B"), _seg(2.0, 6.0, "A")]
        (aw,) = attribute_words([_word("x", 3.0, 4.0)], segments)
        assert aw.speaker == "A"

    def test_touching_segments_tie_on_boundary_word(self):
        segments = [_seg(0.0, 5.0, "B"), _seg(5.0, 10.0, "A")]
        (aw,) = attribute_words([_word("x", 4.5, 5.5)], segments)
        assert aw.speaker == "B"  # equal overlap, earlier start wins

    def test_rescue_within_window(self):
        segments = [_seg(0.0, 10.0, "A")]
        (aw,) = attribute_words([_word("x", 10.2, 10.4)], segments)
        assert aw.speaker == "A"
        assert aw.rescued
        assert aw.overlap == 0.0

    def test_rescue_at_exact_window_boundary(self):
        segments = [_seg(0.0, 10.0, "A")]
        (aw,) = attribute_words([_word("x", 10.5, 10.6)], segments)
        assert aw.rescued

    def test_beyond_window_stays_unattributed(self):
        segments = [_seg(0.0, 10.0, "A")]
        (aw,) = attribute_words([_word("x", 10.501, 10.6)], segments)
        assert aw.speaker is None

    def test_zero_duration_word_inside_segment_is_rescued(self):
        segments = [_seg(0.0, 10.0, "A")]
        (aw,) = attribute_words([_word("x", 5.0, 5.0)], segments)
        assert aw.speaker == "A"
        assert aw.rescued

    def test_upstream_speaker_label_is_superseded(self):
        word = Word(text="x", start=1.0, end=2.0, speaker="upstream")
        (aw,) = attribute_words([word], [_seg(0.0, 5.0, "A")])
        assert aw.speaker == "A"

    def test_no_segments(self):
        attributed = attribute_words([_word("x", 0.0, 1.0)], [])
        assert [aw.speaker for aw in attributed] == [None]

    def test_no_words(self):
        assert attribute_words([], [_seg(0.0, 1.0, "A")]) == []

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(42)
        config = AlignConfig()
        for _ in range(30):
            words = random_words(rng, max_words=60)
            segments = random_segments(rng)
            got = attribute_words(words, segments, config)
            expected = brute_force_attribution(words, segments, config.rescue_window)
            assert [(aw.speaker, aw.overlap, aw.rescued) for aw in got] == expected


class TestFlattenStream:
    def test_sorts_by_start_then_end(self):
        words = [
            AttributedWord(word=_word("b", 1.0, 3.0), speaker="A", overlap=1.0),
            AttributedWord(word=_word("a", 0.0, 1.0), speaker="A", overlap=1.0),
            AttributedWord(word=_word("c", 1.0, 2.0), speaker="A", overlap=1.0),
        ]
        stream = flatten_stream(words)
        assert [aw.word.text for aw in stream] == ["a", "c", "b"]

    def test_sort_is_stable_for_identical_spans(self):
        words = [
            AttributedWord(word=_word(t, 1.0, 2.0), speaker="A", overlap=1.0)
            for t in ("first", "second", "third")
        ]
        stream = flatten_stream(words)
        assert [aw.word.text for aw in stream] == ["first", "second", "third"]

    def test_drops_unattributed_by_default(self):
        words = [
            AttributedWord(word=_word("kept", 0.0, 1.0), speaker="A", overlap=1.0),
            AttributedWord(word=_word("lost", 1.0, 2.0), speaker=None),
        ]
        assert [aw.word.text for aw in flatten_stream(words)] == ["kept"]

    def test_keeps_unattributed_when_configured(self):
        words = [AttributedWord(word=_word("lost", 1.0, 2.0), speaker=None)]
        config = AlignConfig(drop_unattributed=False)
        assert flatten_stream(words, config) == words


def _stream(*entries):
    """Entries are (text, start, end, speaker) tuples, already sorted."""
    return [
        AttributedWord(word=_word(t, s, e), speaker=spk, overlap=e - s, rescued=e <= s)
        for t, s, e, spk in entries
    ]


class TestGroupTurns:
    def test_single_turn(self):
        turns = group_turns(_stream(("hi", 0.0, 0.5, "A"), ("there", 0.8, 1.2, "A")))
        assert len(turns) == 1
        assert turns[0].text == "hi there"
        assert (turns[0].start, turns[0].end) == (0.0, 1.2)

    def test_speaker_change_splits_even_without_pause(self):
        turns = group_turns(_stream(("a", 0.0, 1.0, "A"), ("b", 1.0, 2.0, "B")))
        assert [t.speaker for t in turns] == ["A", "B"]

    def test_pause_below_threshold_merges(self):
        turns = group_turns(_stream(("a", 0.0, 1.0, "A"), ("b", 2.4, 3.0, "A")))
        assert len(turns) == 1

    def test_pause_above_threshold_splits(self):
        turns = group_turns(_stream(("a", 0.0, 1.0, "A"), ("b", 2.6, 3.0, "A")))
        assert len(turns) == 2

    def test_pause_exactly_at_threshold_merges(self):
        turns = group_turns(_stream(("a", 0.0, 1.0, "A"), ("b", 2.5, 3.0, "A")))
        assert len(turns) == 1

    def test_overlapping_words_never_split(self):
        turns = group_turns(_stream(("a", 0.0, 2.0, "A"), ("b", 0.5, 1.0, "A")))
        assert len(turns) == 1
        assert turns[0].end == 1.0  # last word's end, even inside the first

    def test_custom_threshold(self):
        stream = _stream(("a", 0.0, 1.0, "A"), ("b", 1.3, 2.0, "A"))
        assert len(group_turns(stream, AlignConfig(pause_threshold=0.2))) == 2

    def test_rejects_unsorted_stream(self):
        stream = _stream(("b", 1.0, 2.0, "A"), ("a", 0.0, 1.0, "A"))
        with pytest.raises(PreconditionError, match="sorted"):
            group_turns(stream)

    def test_rejects_unattributed_words(self):
        stream = [AttributedWord(word=_word("x", 0.0, 1.0), speaker=None)]
        with pytest.raises(PreconditionError, match="unattributed"):
            group_turns(stream)

    def test_empty_stream(self):
        assert group_turns([]) == []


class TestAlignPipeline:
    def test_short_exchange(self):
        words = [
            _word("Excuse", 6.92, 7.16),
            _word("me", 7.16, 7.23),
        ]
        segments = [_seg(6.92, 7.24, "Speaker_00")]
        (turn,) = align(words, segments)
        assert turn.text == "Excuse me"
        assert turn.speaker == "Speaker_00"
        assert (turn.start, turn.end) == (6.92, 7.23)

    def test_equivalent_to_composed_stages(self):
        rng = np.random.default_rng(5)
        config = AlignConfig()
        for _ in range(10):
            words = random_words(rng, max_words=40)
            segments = random_segments(rng)
            composed = group_turns(
                flatten_stream(attribute_words(words, segments, config), config), config
            )
            assert align(words, segments, config) == composed

    def test_invariants_on_random_sessions(self):
        rng = np.random.default_rng(6)
        config = AlignConfig()
        for _ in range(30):
            words = random_words(rng, max_words=80)
            segments = random_segments(rng)
            stream = flatten_stream(attribute_words(words, segments, config), config)
            turns = group_turns(stream, config)

            # Partition: every stream word appears in exactly one turn, in order.
            regrouped = [aw for t in turns for aw in t.words]
            assert regrouped == stream

            for t in turns:
                # Boundary tightness and constant speaker.
                assert t.start == t.words[0].word.start
                assert t.end == t.words[-1].word.end
                assert all(aw.speaker == t.speaker for aw in t.words)
                # Gap bound inside the turn.
                for a, b in zip(t.words, t.words[1:]):
                    assert b.word.start - a.word.end <= config.pause_threshold + TIME_EPS

            # Minimality: adjacent turns cannot be merged.
            for a, b in zip(turns, turns[1:]):
                gap = b.words[0].word.start - a.words[-1].word.end
                assert a.speaker != b.speaker or gap > config.pause_threshold
