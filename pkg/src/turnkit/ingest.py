"""Parsers and writers for the on-disk interchange formats.

Five document families are handled here:

* word transcripts (JSON, ``{"segments": [{"words": [...]}]}``),
* diarization segments (RTTM lines),
* reference annotations (JSON, ``{"utterances": [...]}`` with emotions),
* turn documents (same record layout as references, plus text and
  optional per-word detail),
* embedding matrices (JSON, ``{"shape": [T, d], "values": [[...]]}``).

Every parser accepts either the document text itself, an ``os.PathLike``,
or an open text stream.  Parsers are strict: malformed records raise
ParseError naming the line or record, impossible values raise
ValidationError, and nothing is silently dropped.  Unknown extra fields in
records are ignored so the formats can grow.

Writers emit documents that the corresponding parser maps back to the same
in-memory value.  Timestamps are written with at least three decimal
places and survive a round trip to better than 1e-9 seconds (exactly, for
values whose shortest decimal form is at least that long).  Matrix values
are written with 17 significant digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError, PreconditionError, ValidationError
from .types import (
    TIME_EPS,
    AttributedWord,
    Emotion,
    ReferenceUtterance,
    SpeakerSegment,
    Turn,
    Word,
)


def _read_source(source) -> str:
    """Return document text from a str, a path-like, or an open stream."""
    if isinstance(source, str):
        return source
    if isinstance(source, os.PathLike):
        return Path(source).read_text(encoding="utf-8")
    read = getattr(source, "read", None)
    if callable(read):
        return read()
    raise PreconditionError(
        f"cannot read a document from {type(source).__name__}; "
        "pass text, a path, or an open text stream"
    )


def _load_json(source, what: str) -> object:
    text = _read_source(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{what}: invalid document at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None


def _field(record: dict, key: str, where: str):
    if key not in record:
        raise ParseError(f"{where}: missing required field {key!r}")
    return record[key]


def _as_number(value, key: str, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: field {key!r} must be a number, got {value!r}")
    return float(value)


def _as_string(value, key: str, where: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{where}: field {key!r} must be a string, got {value!r}")
    return value


def _as_record(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _as_list(value, key: str, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{where}: field {key!r} must be a list, got {type(value).__name__}")
    return value


def _format_seconds(value: float) -> str:
    """Format a timestamp with at least three decimal places.

    Uses the shortest decimal form that reparses to the identical float
    (zero-padded to three decimals when shorter); values that repr in
    scientific notation fall back to nine fixed decimals, which keeps the
    round-trip error below 1e-9.
    """
    text = repr(float(value))
    if "e" in text or "E" in text or not math.isfinite(value):
        return f"{value:.9f}"
    head, _, frac = text.partition(".")
    if len(frac) >= 3:
        return text
    return f"{head}.{frac.ljust(3, '0')}"


def _format_value(value: float) -> str:
    # 17 significant digits reproduce a float64 bit-for-bit.
    return f"{value:.17g}"


# ---------------------------------------------------------------------------
# Word transcripts


def parse_words(source) -> list[Word]:
    """Parse a word-transcript document into a flat word list.

    Words are returned in file order across all segments; no re-sorting
    happens here.  Segment boundaries carry no meaning downstream and are
    deliberately not represented in the result.

    Args:
        source: document text, a path, or an open text stream.

    Returns:
        All words in file order.

    Raises:
        ParseError: malformed JSON or missing/mistyped fields.
        ValidationError: a word with start > end, or empty text.
    """
    doc = _as_record(_load_json(source, "word transcript"), "word transcript")
    segments = _as_list(_field(doc, "segments", "word transcript"), "segments", "word transcript")
    words: list[Word] = []
    for si, seg in enumerate(segments):
        seg_where = f"word transcript segment {si}"
        seg = _as_record(seg, seg_where)
        records = _as_list(_field(seg, "words", seg_where), "words", seg_where)
        for wi, rec in enumerate(records):
            where = f"{seg_where} word {wi}"
            rec = _as_record(rec, where)
            text = _as_string(_field(rec, "text", where), "text", where)
            start = _as_number(_field(rec, "start", where), "start", where)
            end = _as_number(_field(rec, "end", where), "end", where)
            speaker = rec.get("speaker")
            if speaker is not None:
                speaker = _as_string(speaker, "speaker", where)
            try:
                words.append(Word(text=text, start=start, end=end, speaker=speaker))
            except ValidationError as exc:
                raise ValidationError(f"{where}: {exc}") from None
    return words


def _word_record(word: Word) -> str:
    parts = [
        f'"text": {json.dumps(word.text)}',
        f'"start": {_format_seconds(word.start)}',
        f'"end": {_format_seconds(word.end)}',
    ]
    if word.speaker is not None:
        parts.append(f'"speaker": {json.dumps(word.speaker)}')
    return "{" + ", ".join(parts) + "}"


def write_words(words: Sequence[Word]) -> str:
    """Serialize words as a single-segment word-transcript document."""
    rows = ",\n".join(f"      {_word_record(w)}" for w in words)
    body = f"[\n{rows}\n    ]" if words else "[]"
    return (
        "{\n"
        '  "segments": [\n'
        f'    {{"words": {body}}}\n'
        "  ]\n"
        "}\n"
    )


# ---------------------------------------------------------------------------
# Diarization segments (RTTM)


def parse_rttm(source) -> list[SpeakerSegment]:
    """Parse RTTM speaker records.

    Only ``SPEAKER`` records are read; other record types are ignored.
    Comment lines starting with ``;`` and blank lines are skipped.  Field
    layout per line::

        SPEAKER <file-id> <chan> <tbeg> <tdur> <NA> <NA> <speaker> <NA> <NA>

    The segment end is ``tbeg + tdur``.

    Raises:
        ParseError: a SPEAKER line with too few fields or non-numeric
            onset/duration, reported with its line number.
        ValidationError: a non-positive or non-finite duration.
    """
    segments: list[SpeakerSegment] = []
    for lineno, raw in enumerate(_read_source(source).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        fields = line.split()
        if fields[0] != "SPEAKER":
            continue
        if len(fields) < 8:
            raise ParseError(
                f"RTTM line {lineno}: SPEAKER record has {len(fields)} fields, expected at least 8"
            )
        try:
            tbeg = float(fields[3])
            tdur = float(fields[4])
        except ValueError:
            raise ParseError(
                f"RTTM line {lineno}: non-numeric onset/duration "
                f"({fields[3]!r}, {fields[4]!r})"
            ) from None
        if not (math.isfinite(tbeg) and math.isfinite(tdur)):
            raise ValidationError(f"RTTM line {lineno}: non-finite onset/duration")
        if tdur <= 0:
            raise ValidationError(f"RTTM line {lineno}: non-positive duration {fields[4]}")
        segments.append(SpeakerSegment(start=tbeg, end=tbeg + tdur, speaker=fields[7]))
    return segments


def write_rttm(segments: Sequence[SpeakerSegment], file_id: str = "rec0", channel: int = 1) -> str:
    """Serialize segments as RTTM SPEAKER lines."""
    if not file_id or any(ch.isspace() for ch in file_id):
        raise ValidationError(f"RTTM file id must be a non-empty token, got {file_id!r}")
    lines = []
    for seg in segments:
        if any(ch.isspace() for ch in seg.speaker):
            raise ValidationError(
                f"speaker id {seg.speaker!r} contains whitespace and cannot be written as RTTM"
            )
        lines.append(
            f"SPEAKER {file_id} {channel} {_format_seconds(seg.start)} "
            f"{_format_seconds(seg.end - seg.start)} <NA> <NA> {seg.speaker} <NA> <NA>"
        )
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Reference annotations


def parse_reference(source) -> list[ReferenceUtterance]:
    """Parse a reference-annotation document.

    Every record needs start, end, speaker, and emotion; emotions parse
    case-insensitively from the closed four-label set.
    """
    doc = _as_record(_load_json(source, "reference annotation"), "reference annotation")
    records = _as_list(
        _field(doc, "utterances", "reference annotation"), "utterances", "reference annotation"
    )
    utterances: list[ReferenceUtterance] = []
    for ri, rec in enumerate(records):
        where = f"reference annotation utterance {ri}"
        rec = _as_record(rec, where)
        start = _as_number(_field(rec, "start", where), "start", where)
        end = _as_number(_field(rec, "end", where), "end", where)
        speaker = _as_string(_field(rec, "speaker", where), "speaker", where)
        label = _as_string(_field(rec, "emotion", where), "emotion", where)
        try:
            utterances.append(
                ReferenceUtterance(
                    start=start, end=end, speaker=speaker, emotion=Emotion.from_label(label)
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    return utterances


def write_reference(utterances: Sequence[ReferenceUtterance]) -> str:
    """Serialize reference utterances, preserving order."""
    rows = []
    for u in utterances:
        rows.append(
            "    {"
            + ", ".join(
                [
                    f'"start": {_format_seconds(u.start)}',
                    f'"end": {_format_seconds(u.end)}',
                    f'"speaker": {json.dumps(u.speaker)}',
                    f'"emotion": {json.dumps(u.emotion.value)}',
                ]
            )
            + "}"
        )
    body = "[\n" + ",\n".join(rows) + "\n  ]" if rows else "[]"
    return '{\n  "utterances": ' + body + "\n}\n"


# ---------------------------------------------------------------------------
# Turn documents


def _parse_turn_words(word_recs: list, speaker: str, where: str) -> tuple[AttributedWord, ...]:
    attributed: list[AttributedWord] = []
    for wi, wrec in enumerate(word_recs):
        wwhere = f"{where} word {wi}"
        wrec = _as_record(wrec, wwhere)
        text = _as_string(_field(wrec, "text", wwhere), "text", wwhere)
        start = _as_number(_field(wrec, "start", wwhere), "start", wwhere)
        end = _as_number(_field(wrec, "end", wwhere), "end", wwhere)
        source_speaker = wrec.get("speaker")
        if source_speaker is not None:
            source_speaker = _as_string(source_speaker, "speaker", wwhere)
        overlap = wrec.get("overlap")
        if overlap is not None:
            overlap = _as_number(overlap, "overlap", wwhere)
        rescued = wrec.get("rescued")
        if rescued is not None and not isinstance(rescued, bool):
            raise ParseError(f"{wwhere}: field 'rescued' must only be true or false")
        try:
            word = Word(text=text, start=start, end=end, speaker=source_speaker)
            if overlap is None:
                overlap = word.end - word.start
            if rescued is None:
                rescued = overlap <= 0
            attributed.append(
                AttributedWord(word=word, speaker=speaker, overlap=overlap, rescued=rescued)
            )
        except ValidationError as exc:
            raise ValidationError(f"{wwhere}: {exc}") from None
    return tuple(attributed)


def parse_turns(source) -> list[Turn]:
    """Parse a turn document.

    Records carry start, end, speaker, and text, plus an optional emotion
    and optional per-word detail.  When per-word detail is absent (for
    example in hand-written hypothesis files) a single attributed word
    covering the whole span is synthesized so that turn invariants hold.
    """
    doc = _as_record(_load_json(source, "turn document"), "turn document")
    records = _as_list(_field(doc, "utterances", "turn document"), "utterances", "turn document")
    turns: list[Turn] = []
    for ti, rec in enumerate(records):
        where = f"turn document utterance {ti}"
        rec = _as_record(rec, where)
        start = _as_number(_field(rec, "start", where), "start", where)
        end = _as_number(_field(rec, "end", where), "end", where)
        speaker = _as_string(_field(rec, "speaker", where), "speaker", where)
        text = _as_string(_field(rec, "text", where), "text", where)
        label = rec.get("emotion")
        try:
            emotion = None
            if label is not None:
                emotion = Emotion.from_label(_as_string(label, "emotion", where))
            if "words" in rec:
                words = _parse_turn_words(
                    _as_list(rec["words"], "words", where), speaker, where
                )
            else:
                span = Word(text=text, start=start, end=end)
                words = (
                    AttributedWord(
                        word=span,
                        speaker=speaker,
                        overlap=span.end - span.start,
                        rescued=span.end <= span.start,
                    ),
                )
            turns.append(
                Turn(
                    speaker=speaker,
                    words=words,
                    start=start,
                    end=end,
                    text=text,
                    emotion=emotion,
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    return turns


def _check_same_speaker_turn_overlap(turns: Sequence[Turn]) -> None:
    by_speaker: dict[str, list[Turn]] = {}
    for t in turns:
        by_speaker.setdefault(t.speaker, []).append(t)
    for speaker, group in by_speaker.items():
        group = sorted(group, key=lambda t: (t.start, t.end))
        for prev, cur in zip(group, group[1:]):
            if prev.end - cur.start > TIME_EPS:
                raise ValidationError(
                    f"turns for speaker {speaker!r} overlap: "
                    f"[{prev.start}, {prev.end}] and [{cur.start}, {cur.end}]"
                )


def _turn_word_record(aw: AttributedWord) -> str:
    parts = [
        f'"text": {json.dumps(aw.word.text)}',
        f'"start": {_format_seconds(aw.word.start)}',
        f'"end": {_format_seconds(aw.word.end)}',
    ]
    if aw.word.speaker is not None:
        parts.append(f'"speaker": {json.dumps(aw.word.speaker)}')
    parts.append(f'"overlap": {_format_seconds(aw.overlap)}')
    parts.append(f'"rescued": {"true" if aw.rescued else "false"}')
    return "{" + ", ".join(parts) + "}"


def write_turns(turns: Sequence[Turn]) -> str:
    """Serialize turns, sorted by start time, with per-word detail.

    Raises:
        ValidationError: two turns of the same speaker overlap in time,
            which indicates corrupt upstream state.
    """
    ordered = sorted(turns, key=lambda t: (t.start, t.end))
    _check_same_speaker_turn_overlap(ordered)
    rows = []
    for t in ordered:
        parts = [
            f'"start": {_format_seconds(t.start)}',
            f'"end": {_format_seconds(t.end)}',
            f'"speaker": {json.dumps(t.speaker)}',
        ]
        if t.emotion is not None:
            parts.append(f'"emotion": {json.dumps(t.emotion.value)}')
        parts.append(f'"text": {json.dumps(t.text)}')
        words = ", ".join(_turn_word_record(aw) for aw in t.words)
        parts.append(f'"words": [{words}]')
        rows.append("    {" + ", ".join(parts) + "}")
    body = "[\n" + ",\n".join(rows) + "\n  ]" if rows else "[]"
    return '{\n  "utterances": ' + body + "\n}\n"


# ---------------------------------------------------------------------------
# Embedding matrices


def parse_embedding(source) -> np.ndarray:
    """Parse an embedding document into a float64 matrix of shape (T, d).

    Raises:
        ParseError: malformed JSON, a bad shape declaration, or
            non-numeric entries.
        ValidationError: shape/values disagreement, an empty dimension,
            or NaN/infinite values.
    """
    doc = _as_record(_load_json(source, "embedding document"), "embedding document")
    shape = _field(doc, "shape", "embedding document")
    if (
        not isinstance(shape, list)
        or len(shape) != 2
        or any(isinstance(v, bool) or not isinstance(v, int) for v in shape)
    ):
        raise ParseError("embedding document: 'shape' must be a list of two integers")
    frames, dims = shape
    if frames < 1 or dims < 1:
        raise ValidationError(f"embedding shape [{frames}, {dims}] must be at least [1, 1]")
    values = _as_list(
        _field(doc, "values", "embedding document"), "values", "embedding document"
    )
    if len(values) != frames:
        raise ValidationError(
            f"embedding document has {len(values)} rows but shape declares {frames}"
        )
    for ri, row in enumerate(values):
        if not isinstance(row, list):
            raise ParseError(f"embedding document row {ri}: expected a list of numbers")
        if len(row) != dims:
            raise ValidationError(
                f"embedding document row {ri} has {len(row)} values but shape declares {dims}"
            )
        for ci, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"embedding document row {ri} column {ci}: not a number")
    matrix = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("embedding contains NaN or infinite values")
    return matrix


def write_embedding(matrix: np.ndarray) -> str:
    """Serialize a matrix as an embedding document (row-major, exact)."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(
            f"embedding must be a 2-D matrix with at least one row and column, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("embedding contains NaN or infinite values")
    rows = ",\n    ".join(
        "[" + ", ".join(_format_value(float(v)) for v in row) + "]" for row in arr
    )
    return (
        "{\n"
        f'  "shape": [{arr.shape[0]}, {arr.shape[1]}],\n'
        f'  "values": [\n    {rows}\n  ]\n'
        "}\n"
    )
