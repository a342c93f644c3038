"""Seeded random instance generators shared across the test modules.

All timestamps are produced on a 1 millisecond grid (integer ticks divided
by 1000) so the dense-grid oracles in oracles.py recover activity exactly.
"""

from __future__ import annotations

import numpy as np

from turnkit.types import EMOTIONS, LabeledInterval, SpeakerSegment, Word

SPEAKERS = ("Speaker_00", "Speaker_01", "Speaker_02", "Speaker_03")


def ms(tick: int) -> float:
    """Millisecond tick to seconds, keeping the value on the grid."""
    return int(tick) / 1000.0


def random_words(rng: np.random.Generator, max_words: int = 200) -> list[Word]:
    """A jittery word stream: overlaps, zero-duration words, random order."""
    n = int(rng.integers(1, max_words + 1))
    words = []
    cursor = int(rng.integers(0, 2000))
    for i in range(n):
        cursor = max(0, cursor + int(rng.integers(-300, 1200)))
        duration = int(rng.integers(0, 600))
        words.append(Word(text=f"w{i}", start=ms(cursor), end=ms(cursor + duration)))
        cursor += duration
    if rng.random() < 0.3:
        words = [words[i] for i in rng.permutation(n)]
    return words


def random_segments(
    rng: np.random.Generator,
    max_speakers: int = 4,
    max_segments: int = 6,
    horizon: int = 30000,
) -> list[SpeakerSegment]:
    """Diarization segments; speakers may overlap themselves and each other."""
    segments = []
    for s in range(int(rng.integers(1, max_speakers + 1))):
        for _ in range(int(rng.integers(1, max_segments + 1))):
            start = int(rng.integers(0, horizon))
            duration = int(rng.integers(200, 5000))
            segments.append(
                SpeakerSegment(
                    start=ms(start), end=ms(start + duration), speaker=SPEAKERS[s]
                )
            )
    return segments


def random_labeled_intervals(
    rng: np.random.Generator,
    n_speakers: int,
    horizon: int = 30000,
    max_intervals: int = 4,
) -> list[LabeledInterval]:
    """Emotion-labeled speech, disjoint per speaker, overlapping across."""
    intervals = []
    for s in range(n_speakers):
        k = int(rng.integers(1, max_intervals + 1))
        points = sorted(int(p) for p in rng.choice(horizon, size=2 * k, replace=False))
        for lo, hi in zip(points[::2], points[1::2]):
            intervals.append(
                LabeledInterval(
                    start=ms(lo),
                    end=ms(hi),
                    speaker=SPEAKERS[s],
                    emotion=EMOTIONS[int(rng.integers(0, len(EMOTIONS)))],
                )
            )
    return intervals
