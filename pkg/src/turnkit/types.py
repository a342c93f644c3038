"""Core domain types shared by the alignment, scoring, and fusion layers.

All timestamps are seconds as float64.  Values are immutable; operations
return new objects instead of mutating.  Comparisons between timestamps
elsewhere in the package use an explicit epsilon of 1e-9 seconds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError

#: Epsilon for timestamp comparisons, in seconds.
TIME_EPS = 1e-9


class Emotion(enum.Enum):
    """Categorical emotion label from the closed four-label set."""

    HAPPY = "happy"
    SAD = "sad"
    ANGRY = "angry"
    NEUTRAL = "neutral"

    @classmethod
    def from_label(cls, label: str) -> "Emotion":
        """Parse a label case-insensitively.

        Args:
            label: e.g. ``"Happy"`` or ``"neutral"``.

        Returns:
            The matching Emotion member.

        Raises:
            ValidationError: if the label is not one of the four known ones.
        """
        if not isinstance(label, str):
            raise ValidationError(f"emotion label must be a string, got {type(label).__name__}")
        try:
            return cls(label.strip().lower())
        except ValueError:
            known = ", ".join(m.value for m in cls)
            raise ValidationError(f"unknown emotion label {label!r} (known: {known})") from None


#: Canonical class order used by the classifier head and reports.
EMOTIONS: tuple[Emotion, ...] = tuple(Emotion)


def _check_finite_time(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{what} is not a finite number: {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class Word:
    """One transcribed token with timestamps.

    The text is stored stripped of surrounding whitespace.  ``speaker`` is
    an optional label carried over from the upstream transcript; speaker
    attribution ignores and supersedes it.
    """

    text: str
    start: float
    end: float
    speaker: str | None = None

    def __post_init__(self) -> None:
        text = self.text.strip()
        if not text:
            raise ValidationError("word text is empty after trimming")
        if "\n" in text or "\r" in text:
            raise ValidationError(f"word text contains a newline: {self.text!r}")
        object.__setattr__(self, "text", text)
        object.__setattr__(self, "start", _check_finite_time(self.start, f"word {text!r} start"))
        object.__setattr__(self, "end", _check_finite_time(self.end, f"word {text!r} end"))
        if self.start < 0:
            raise ValidationError(f"word {text!r} has negative start {self.start}")
        if self.start > self.end:
            raise ValidationError(f"word {text!r} has start {self.start} > end {self.end}")


@dataclass(frozen=True, slots=True)
class SpeakerSegment:
    """A diarization segment: one speaker active over an open time span."""

    start: float
    end: float
    speaker: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _check_finite_time(self.start, "segment start"))
        object.__setattr__(self, "end", _check_finite_time(self.end, "segment end"))
        if not self.speaker:
            raise ValidationError("segment speaker id is empty")
        if not self.start < self.end:
            raise ValidationError(
                f"segment for {self.speaker!r} has non-positive duration "
                f"[{self.start}, {self.end}]"
            )


@dataclass(frozen=True, slots=True)
class LabeledInterval:
    """A speaker- and emotion-labeled time interval used for scoring."""

    start: float
    end: float
    speaker: str
    emotion: Emotion

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _check_finite_time(self.start, "interval start"))
        object.__setattr__(self, "end", _check_finite_time(self.end, "interval end"))
        if not self.speaker:
            raise ValidationError("interval speaker id is empty")
        if not self.start < self.end:
            raise ValidationError(
                f"interval for {self.speaker!r} has non-positive duration "
                f"[{self.start}, {self.end}]"
            )
        if not isinstance(self.emotion, Emotion):
            raise ValidationError(f"interval emotion must be an Emotion, got {self.emotion!r}")

    @property
    def duration(self) -> float:
        return self.end - self.start


# A ground-truth annotation row has exactly the shape of a labeled interval.
ReferenceUtterance = LabeledInterval


@dataclass(frozen=True, slots=True)
class AttributedWord:
    """A word plus the speaker the attribution step assigned to it.

    ``speaker`` is None when no segment could be found (unattributed).
    ``overlap`` is the temporal overlap in seconds with the chosen segment;
    ``rescued`` marks words with zero overlap that were adopted by the
    nearest segment boundary.
    """

    word: Word
    speaker: str | None
    overlap: float = 0.0
    rescued: bool = False

    def __post_init__(self) -> None:
        if self.overlap < 0:
            raise ValidationError(f"attribution overlap is negative: {self.overlap}")
        if self.speaker is not None and self.overlap <= 0 and not self.rescued:
            raise ValidationError(
                f"word {self.word.text!r} attributed to {self.speaker!r} with zero "
                "overlap but not marked rescued"
            )


@dataclass(frozen=True, slots=True)
class Turn:
    """A maximal run of same-speaker words with bounded inter-word pauses.

    Invariants checked on construction: words are non-empty and all carry
    the turn's speaker, the boundaries equal the first word's start and the
    last word's end, and the text is the word texts joined by single spaces.
    The pause bound itself depends on the grouping configuration and is
    guaranteed by the grouping step, not re-checked here.
    """

    speaker: str
    words: tuple[AttributedWord, ...]
    start: float
    end: float
    text: str
    emotion: Emotion | None = None

    def __post_init__(self) -> None:
        if not self.words:
            raise ValidationError("turn has no words")
        object.__setattr__(self, "words", tuple(self.words))
        if not self.speaker:
            raise ValidationError("turn speaker id is empty")
        for aw in self.words:
            if aw.speaker != self.speaker:
                raise ValidationError(
                    f"turn speaker {self.speaker!r} does not match word "
                    f"{aw.word.text!r} attributed to {aw.speaker!r}"
                )
        first, last = self.words[0].word, self.words[-1].word
        if abs(self.start - first.start) > TIME_EPS:
            raise ValidationError(
                f"turn start {self.start} does not equal first word start {first.start}"
            )
        if abs(self.end - last.end) > TIME_EPS:
            raise ValidationError(
                f"turn end {self.end} does not equal last word end {last.end}"
            )
        joined = " ".join(aw.word.text for aw in self.words)
        if self.text != joined:
            raise ValidationError(
                f"turn text {self.text!r} does not equal joined word texts {joined!r}"
            )
        if self.emotion is not None and not isinstance(self.emotion, Emotion):
            raise ValidationError(f"turn emotion must be an Emotion, got {self.emotion!r}")

    @classmethod
    def from_words(
        cls, words: Sequence[AttributedWord], emotion: Emotion | None = None
    ) -> "Turn":
        """Build a turn from attributed words, deriving boundaries and text."""
        if not words:
            raise ValidationError("cannot build a turn from zero words")
        if words[0].speaker is None:
            raise ValidationError("cannot build a turn from unattributed words")
        return cls(
            speaker=words[0].speaker,
            words=tuple(words),
            start=words[0].word.start,
            end=words[-1].word.end,
            text=" ".join(aw.word.text for aw in words),
            emotion=emotion,
        )

    @property
    def duration(self) -> float:
        return self.end - self.start
