"""Rebuild speaker turns from a word stream and diarization segments.

The pipeline has three stages.  First every word is attributed to the
diarization segment it overlaps most (attribute_words).  Second the words
are flattened into one chronological stream, dissolving whatever segment
structure the transcript arrived with (flatten_stream).  Third consecutive
same-speaker words are greedily merged into turns, splitting only on a
speaker change or on a silence longer than the pause threshold
(group_turns).  ``align`` composes the three.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PreconditionError, ValidationError
from .types import TIME_EPS, AttributedWord, SpeakerSegment, Turn, Word


@dataclass(frozen=True, slots=True)
class AlignConfig:
    """Tunables for the alignment pipeline.

    Attributes:
        pause_threshold: longest silence, in seconds, allowed inside one
            turn.  Must be positive.
        rescue_window: how far, in seconds, a zero-overlap word may sit
            from the nearest segment boundary and still be adopted by that
            segment.  Must be non-negative.
        drop_unattributed: whether flatten_stream removes words that no
            segment claimed.
    """

    pause_threshold: float = 1.5
    rescue_window: float = 0.5
    drop_unattributed: bool = True

    def __post_init__(self) -> None:
        if not self.pause_threshold > 0:
            raise ValidationError(
                f"pause_threshold must be positive, got {self.pause_threshold}"
            )
        if self.rescue_window < 0:
            raise ValidationError(
                f"rescue_window must be non-negative, got {self.rescue_window}"
            )


def attribute_words(
    words: Sequence[Word],
    segments: Sequence[SpeakerSegment],
    config: AlignConfig | None = None,
) -> list[AttributedWord]:
    """Assign each word the speaker of its maximal-overlap segment.

    Ties on overlap go to the segment with the earlier start, then to the
    lexicographically smaller speaker id.  A word overlapping no segment is
    adopted by the nearest segment boundary when the gap is at most
    ``config.rescue_window`` (marked rescued), otherwise it stays
    unattributed (speaker None).  Any speaker label already present on a
    word is ignored and superseded.

    Args:
        words: words of one recording, any order.
        segments: diarization segments of the same recording.
        config: alignment tunables; defaults apply when omitted.

    Returns:
        One AttributedWord per input word, in input order.
    """
    config = config or AlignConfig()
    if not words:
        return []
    if not segments:
        return [AttributedWord(word=w, speaker=None) for w in words]

    # Fix the scan order once so argmax/argmin tie-breaking lands on the
    # earlier start, then the smaller speaker id.
    ordered = sorted(segments, key=lambda s: (s.start, s.speaker))
    seg_start = np.array([s.start for s in ordered])
    seg_end = np.array([s.end for s in ordered])
    word_start = np.array([w.start for w in words])
    word_end = np.array([w.end for w in words])

    overlap = np.minimum(word_end[:, None], seg_end[None, :]) - np.maximum(
        word_start[:, None], seg_start[None, :]
    )
    gap = np.maximum(
        0.0,
        np.maximum(seg_start[None, :] - word_end[:, None], word_start[:, None] - seg_end[None, :]),
    )

    best = overlap.argmax(axis=1)
    nearest = gap.argmin(axis=1)
    attributed: list[AttributedWord] = []
    for i, word in enumerate(words):
        j = int(best[i])
        if overlap[i, j] > 0:
            attributed.append(
                AttributedWord(
                    word=word, speaker=ordered[j].speaker, overlap=float(overlap[i, j])
                )
            )
            continue
        j = int(nearest[i])
        if gap[i, j] <= config.rescue_window:
            attributed.append(
                AttributedWord(word=word, speaker=ordered[j].speaker, overlap=0.0, rescued=True)
            )
        else:
            attributed.append(AttributedWord(word=word, speaker=None))
    return attributed


def flatten_stream(
    attributed: Sequence[AttributedWord],
    config: AlignConfig | None = None,
) -> list[AttributedWord]:
    """Order attributed words into one chronological stream.

    The sort is stable on (start, end), so words with identical timestamps
    keep their original relative order.  Unattributed words are dropped
    when ``config.drop_unattributed`` is set (the default).
    """
    config = config or AlignConfig()
    stream = sorted(attributed, key=lambda aw: (aw.word.start, aw.word.end))
    if config.drop_unattributed:
        stream = [aw for aw in stream if aw.speaker is not None]
    return stream


def group_turns(
    stream: Sequence[AttributedWord],
    config: AlignConfig | None = None,
) -> list[Turn]:
    """Greedily merge a sorted, fully attributed stream into turns.

    A new turn starts on a speaker change or when the silence between
    consecutive words exceeds the pause threshold.  Overlapping words
    (negative gaps) never split.

    Raises:
        PreconditionError: the stream is not sorted by (start, end), or
            contains unattributed words.
    """
    config = config or AlignConfig()
    previous = None
    for i, aw in enumerate(stream):
        if aw.speaker is None:
            raise PreconditionError(
                f"stream word {i} ({aw.word.text!r}) is unattributed; "
                "drop or attribute it before grouping"
            )
        key = (aw.word.start, aw.word.end)
        if previous is not None and key < previous:
            raise PreconditionError(f"stream is not chronologically sorted at word {i}")
        previous = key

    turns: list[Turn] = []
    group: list[AttributedWord] = []
    for aw in stream:
        if group:
            gap = aw.word.start - group[-1].word.end
            if aw.speaker == group[-1].speaker and gap <= config.pause_threshold + TIME_EPS:
                group.append(aw)
                continue
            turns.append(Turn.from_words(group))
            group = []
        group.append(aw)
    if group:
        turns.append(Turn.from_words(group))
    return turns


def align(
    words: Sequence[Word],
    segments: Sequence[SpeakerSegment],
    config: AlignConfig | None = None,
) -> list[Turn]:
    """Full pipeline: attribute words, flatten, and group into turns."""
    config = config or AlignConfig()
    return group_turns(flatten_stream(attribute_words(words, segments, config), config), config)
