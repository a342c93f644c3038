"""turnkit: speaker-attributed turns, emotion-timeline scoring, and fusion.

The package has three layers.  ``turnkit.align`` rebuilds speaker turns
from word-level ASR timestamps and diarization segments.  ``turnkit.
metrics`` scores emotion-labeled timelines with duration-weighted error
rates (speaker-agnostic TEER and speaker-attributed sTEER) plus standard
utterance-level classification statistics.  ``turnkit.fusion`` is a small,
exactly-reproducible numpy implementation of a gated cross-attention
fusion classifier over pooled text/audio embeddings, with analytic
gradients and a toy trainer.  ``turnkit.ingest`` holds the parsers and
writers for all on-disk formats, and ``turnkit.cli`` exposes the
``turnkit`` command.
"""

from . import fusion
from .align import AlignConfig, align, attribute_words, flatten_stream, group_turns
from .errors import (
    DegenerateInputError,
    ParseError,
    PreconditionError,
    TrainingError,
    TurnkitError,
    ValidationError,
)
from .ingest import (
    parse_embedding,
    parse_reference,
    parse_rttm,
    parse_turns,
    parse_words,
    write_embedding,
    write_reference,
    write_rttm,
    write_turns,
    write_words,
)
from .metrics import (
    ClassificationReport,
    ClassMetrics,
    SpeakerMapping,
    TeerBreakdown,
    TimelineSlice,
    build_score_report,
    build_timeline,
    classification_report,
    compute_steer,
    compute_teer,
    match_labels,
    optimal_speaker_mapping,
)
from .types import (
    EMOTIONS,
    TIME_EPS,
    AttributedWord,
    Emotion,
    LabeledInterval,
    ReferenceUtterance,
    SpeakerSegment,
    Turn,
    Word,
)

__version__ = "0.1.0"

__all__ = [
    "AlignConfig",
    "AttributedWord",
    "ClassMetrics",
    "ClassificationReport",
    "DegenerateInputError",
    "EMOTIONS",
    "Emotion",
    "LabeledInterval",
    "ParseError",
    "PreconditionError",
    "ReferenceUtterance",
    "SpeakerMapping",
    "SpeakerSegment",
    "TIME_EPS",
    "TeerBreakdown",
    "TimelineSlice",
    "TrainingError",
    "Turn",
    "TurnkitError",
    "ValidationError",
    "Word",
    "align",
    "attribute_words",
    "build_score_report",
    "build_timeline",
    "classification_report",
    "compute_steer",
    "compute_teer",
    "flatten_stream",
    "fusion",
    "group_turns",
    "match_labels",
    "optimal_speaker_mapping",
    "parse_embedding",
    "parse_reference",
    "parse_rttm",
    "parse_turns",
    "parse_words",
    "write_embedding",
    "write_reference",
    "write_rttm",
    "write_turns",
    "write_words",
]
