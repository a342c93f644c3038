"""Duration-weighted scoring of emotion-labeled speech timelines.

Two complementary views are provided.  The timeline view slices the session
at every interval boundary and charges each elementary slice with missed
speech (MS), false-alarm speech (FA), and emotion confusion (CONF):

* ``compute_teer`` pairs reference and hypothesis speech speaker-
  agnostically, so only the emotion content matters;
* ``compute_steer`` first maps hypothesis speakers onto reference speakers
  (``optimal_speaker_mapping``) and additionally charges pairs whose mapped
  speaker is wrong.

Both report ``(MS + FA + CONF) / TOTAL`` where TOTAL is the reference
speech duration summed over speakers.  A per-slice collar of zero is used:
boundaries count exactly.

The utterance view (``match_labels`` + ``classification_report``) reduces
the session to one predicted label per reference utterance and computes
standard classification statistics.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateInputError, ValidationError
from .types import EMOTIONS, Emotion, LabeledInterval, ReferenceUtterance


@dataclass(frozen=True, slots=True)
class TimelineSlice:
    """An elementary interval with the intervals active on each side."""

    start: float
    end: float
    ref: tuple[LabeledInterval, ...]
    hyp: tuple[LabeledInterval, ...]

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class TeerBreakdown:
    """Duration-weighted error components, all in seconds except the rate."""

    ms: float
    fa: float
    conf: float
    total: float

    @property
    def rate(self) -> float:
        return (self.ms + self.fa + self.conf) / self.total


@dataclass(frozen=True, slots=True)
class SpeakerMapping:
    """An injective hypothesis-to-reference speaker map and its overlap mass."""

    mapping: dict[str, str]
    overlap: float


def _check_no_self_overlap(intervals: Sequence[LabeledInterval], stream: str) -> None:
    by_speaker: dict[str, list[LabeledInterval]] = {}
    for iv in intervals:
        by_speaker.setdefault(iv.speaker, []).append(iv)
    for speaker, group in by_speaker.items():
        group = sorted(group, key=lambda iv: (iv.start, iv.end))
        for prev, cur in zip(group, group[1:]):
            if cur.start < prev.end:
                raise ValidationError(
                    f"{stream} stream: speaker {speaker!r} overlaps itself in "
                    f"[{prev.start}, {prev.end}] and [{cur.start}, {cur.end}]"
                )


def build_timeline(
    ref: Sequence[LabeledInterval], hyp: Sequence[LabeledInterval]
) -> list[TimelineSlice]:
    """Cut both streams at every boundary into elementary slices.

    The slices partition the span from the earliest to the latest boundary
    of either stream; slices where neither stream is active carry empty
    tuples.  Within each stream a speaker may not overlap itself; speakers
    may freely overlap each other.

    Raises:
        ValidationError: same-speaker self-overlap within one stream.
    """
    _check_no_self_overlap(ref, "reference")
    _check_no_self_overlap(hyp, "hypothesis")
    bounds = sorted(
        {iv.start for iv in ref}
        | {iv.end for iv in ref}
        | {iv.start for iv in hyp}
        | {iv.end for iv in hyp}
    )
    slices = []
    for lo, hi in zip(bounds, bounds[1:]):
        # Boundaries are snapped, so activity over a slice is all-or-nothing.
        slices.append(
            TimelineSlice(
                start=lo,
                end=hi,
                ref=tuple(iv for iv in ref if iv.start < hi and iv.end > lo),
                hyp=tuple(iv for iv in hyp if iv.start < hi and iv.end > lo),
            )
        )
    return slices


def compute_teer(
    ref: Sequence[LabeledInterval], hyp: Sequence[LabeledInterval]
) -> TeerBreakdown:
    """Speaker-agnostic emotion error rate over the timeline.

    Per slice, reference and hypothesis speech are paired to maximize
    emotion agreement; unpaired reference speech is missed, unpaired
    hypothesis speech is a false alarm, and paired speech with differing
    emotions is confusion.

    Raises:
        DegenerateInputError: the reference carries no speech at all.
        ValidationError: same-speaker self-overlap within one stream.
    """
    ms = fa = conf = total = 0.0
    for sl in build_timeline(ref, hyp):
        delta = sl.duration
        r_emotions = Counter(iv.emotion for iv in sl.ref)
        h_emotions = Counter(iv.emotion for iv in sl.hyp)
        n_ref = sum(r_emotions.values())
        n_hyp = sum(h_emotions.values())
        agree = sum((r_emotions & h_emotions).values())
        ms += delta * max(0, n_ref - n_hyp)
        fa += delta * max(0, n_hyp - n_ref)
        conf += delta * (min(n_ref, n_hyp) - agree)
        total += delta * n_ref
    if total <= 0:
        raise DegenerateInputError("reference stream carries no labeled speech")
    return TeerBreakdown(ms=ms, fa=fa, conf=conf, total=total)


def _pairwise_overlap(
    a: Iterable[LabeledInterval], b: Iterable[LabeledInterval]
) -> float:
    return sum(
        max(0.0, min(x.end, y.end) - max(x.start, y.start))
        for x, y in itertools.product(a, b)
    )


def optimal_speaker_mapping(
    ref: Sequence[LabeledInterval], hyp: Sequence[LabeledInterval]
) -> SpeakerMapping:
    """Find the injective hypothesis-to-reference speaker map with maximal
    total time overlap.

    Solved as a rectangular assignment problem; pairs with zero overlap are
    never mapped.  The mapping is global for the session.
    """
    ref_ids = sorted({iv.speaker for iv in ref})
    hyp_ids = sorted({iv.speaker for iv in hyp})
    if not ref_ids or not hyp_ids:
        return SpeakerMapping(mapping={}, overlap=0.0)
    ref_by_id = {r: [iv for iv in ref if iv.speaker == r] for r in ref_ids}
    hyp_by_id = {h: [iv for iv in hyp if iv.speaker == h] for h in hyp_ids}
    weight = np.array(
        [[_pairwise_overlap(hyp_by_id[h], ref_by_id[r]) for r in ref_ids] for h in hyp_ids]
    )
    rows, cols = linear_sum_assignment(weight, maximize=True)
    mapping = {}
    overlap = 0.0
    for i, j in zip(rows, cols):
        if weight[i, j] > 0:
            mapping[hyp_ids[i]] = ref_ids[j]
            overlap += float(weight[i, j])
    return SpeakerMapping(mapping=mapping, overlap=overlap)


def compute_steer(
    ref: Sequence[LabeledInterval], hyp: Sequence[LabeledInterval]
) -> TeerBreakdown:
    """Speaker-attributed emotion error rate over the timeline.

    MS, FA, and TOTAL are computed exactly as in compute_teer.  Pairing
    prefers, in order: mapped-speaker and emotion both right, mapped
    speaker right, then any pairing; a pair is charged to CONF when its
    mapped speaker or its emotion is wrong.  Within a slice each speaker is
    active at most once and the speaker map is injective, so every
    hypothesis interval has at most one candidate reference and the greedy
    preference order is exact.

    Raises:
        DegenerateInputError: the reference carries no speech at all.
        ValidationError: same-speaker self-overlap within one stream.
    """
    mapping = optimal_speaker_mapping(ref, hyp).mapping
    ms = fa = conf = total = 0.0
    for sl in build_timeline(ref, hyp):
        delta = sl.duration
        n_ref = len(sl.ref)
        n_hyp = len(sl.hyp)
        ref_by_speaker = {iv.speaker: iv for iv in sl.ref}
        both_right = 0
        for hv in sl.hyp:
            mapped = mapping.get(hv.speaker)
            candidate = ref_by_speaker.get(mapped) if mapped is not None else None
            if candidate is not None and candidate.emotion == hv.emotion:
                both_right += 1
        ms += delta * max(0, n_ref - n_hyp)
        fa += delta * max(0, n_hyp - n_ref)
        conf += delta * (min(n_ref, n_hyp) - both_right)
        total += delta * n_ref
    if total <= 0:
        raise DegenerateInputError("reference stream carries no labeled speech")
    return TeerBreakdown(ms=ms, fa=fa, conf=conf, total=total)


def match_labels(
    ref: Sequence[ReferenceUtterance], hyp: Sequence
) -> list[tuple[Emotion, Emotion | None]]:
    """Pair each reference utterance with the predicted emotion of its
    maximal-overlap hypothesis turn.

    Ties go to the hypothesis with the earlier start.  A reference
    utterance overlapping nothing is paired with None, which downstream
    counts as a misclassification.

    Args:
        ref: reference utterances.
        hyp: objects with start, end, and emotion attributes (turns or
            labeled intervals); every emotion must be set.

    Raises:
        ValidationError: a hypothesis entry without an emotion label.
    """
    for i, h in enumerate(hyp):
        if h.emotion is None:
            raise ValidationError(f"hypothesis entry {i} has no emotion label")
    ordered = sorted(range(len(hyp)), key=lambda i: (hyp[i].start, i))
    pairs: list[tuple[Emotion, Emotion | None]] = []
    for r in ref:
        best_overlap = 0.0
        best: Emotion | None = None
        for i in ordered:
            h = hyp[i]
            overlap = min(r.end, h.end) - max(r.start, h.start)
            if overlap > best_overlap:
                best_overlap = overlap
                best = h.emotion
        pairs.append((r.emotion, best))
    return pairs


@dataclass(frozen=True, slots=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True, slots=True)
class ClassificationReport:
    """Utterance-level classification statistics over the four emotions.

    The confusion matrix maps reference emotion to predicted emotion
    counts, with None as the no-prediction column; row sums equal the
    per-class supports.
    """

    accuracy: float
    per_class: dict[Emotion, ClassMetrics]
    weighted_f1: float
    macro_f1: float
    confusion: dict[Emotion, dict[Emotion | None, int]]
    total: int


def classification_report(
    pairs: Sequence[tuple[Emotion, Emotion | None]]
) -> ClassificationReport:
    """Compute accuracy, per-class precision/recall/F1, weighted and macro
    F1, and the confusion matrix from (reference, predicted) pairs.

    A None prediction contributes to its reference class support but to no
    predicted class.

    Raises:
        DegenerateInputError: no pairs at all.
    """
    if not pairs:
        raise DegenerateInputError("classification report over an empty pair list")
    confusion: dict[Emotion, dict[Emotion | None, int]] = {
        e: {p: 0 for p in (*EMOTIONS, None)} for e in EMOTIONS
    }
    for truth, predicted in pairs:
        confusion[truth][predicted] += 1

    per_class: dict[Emotion, ClassMetrics] = {}
    correct = 0
    for label in EMOTIONS:
        support = sum(confusion[label].values())
        tp = confusion[label][label]
        predicted_as = sum(confusion[e][label] for e in EMOTIONS)
        precision = tp / predicted_as if predicted_as else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = ClassMetrics(
            precision=precision, recall=recall, f1=f1, support=support
        )
        correct += tp

    total = len(pairs)
    weighted_f1 = sum(m.f1 * m.support for m in per_class.values()) / total
    macro_f1 = sum(m.f1 for m in per_class.values()) / len(EMOTIONS)
    return ClassificationReport(
        accuracy=correct / total,
        per_class=per_class,
        weighted_f1=weighted_f1,
        macro_f1=macro_f1,
        confusion=confusion,
        total=total,
    )


def build_score_report(
    teer: TeerBreakdown | None = None,
    steer: TeerBreakdown | None = None,
    classification: ClassificationReport | None = None,
) -> dict:
    """Assemble the serializable score report; sections not supplied are
    omitted."""
    report: dict = {}
    for key, breakdown in (("teer", teer), ("steer", steer)):
        if breakdown is not None:
            report[key] = {
                "ms": breakdown.ms,
                "fa": breakdown.fa,
                "conf": breakdown.conf,
                "total": breakdown.total,
                "rate": breakdown.rate,
            }
    if classification is not None:
        report["classification"] = {
            "accuracy": classification.accuracy,
            "weighted_f1": classification.weighted_f1,
            "macro_f1": classification.macro_f1,
            "total": classification.total,
            "per_class": {
                label.value: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in classification.per_class.items()
            },
            "confusion": {
                truth.value: {
                    (pred.value if pred is not None else "none"): count
                    for pred, count in row.items()
                }
                for truth, row in classification.confusion.items()
            },
        }
    return report
