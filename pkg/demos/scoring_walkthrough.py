"""Walk through the duration-weighted emotion error rates on one session.

A 30 second session has two reference speakers.  The hypothesis found only
one speaker and got part of the emotion wrong.  The demo shows how the
timeline is sliced, what each error component charges, and why the
speaker-attributed rate is higher than the speaker-agnostic one.

Run with:  python3 demos/scoring_walkthrough.py
"""

from turnkit.metrics import (
    build_timeline,
    classification_report,
    compute_steer,
    compute_teer,
    match_labels,
    optimal_speaker_mapping,
)
from turnkit.types import Emotion, LabeledInterval

# Reference: A speaks happily for 10 s, then B takes over for 20 s.
reference = [
    LabeledInterval(start=0.0, end=10.0, speaker="A", emotion=Emotion.HAPPY),
    LabeledInterval(start=10.0, end=30.0, speaker="B", emotion=Emotion.HAPPY),
]
# Hypothesis: one speaker X from 5 s on, emotion correct throughout.
hypothesis = [
    LabeledInterval(start=5.0, end=30.0, speaker="X", emotion=Emotion.HAPPY),
]

print("Timeline slices (reference speakers | hypothesis speakers):")
for sl in build_timeline(reference, hypothesis):
    ref_ids = ",".join(iv.speaker for iv in sl.ref) or "-"
    hyp_ids = ",".join(iv.speaker for iv in sl.hyp) or "-"
    print(f"  [{sl.start:5.1f} - {sl.end:5.1f}]  {ref_ids:<5} | {hyp_ids}")

teer = compute_teer(reference, hypothesis)
print()
print("Speaker-agnostic rate: emotion content is all that matters.")
print(f"  missed speech  {teer.ms:5.1f} s   (nobody speaks in the hypothesis before 5 s)")
print(f"  false alarm    {teer.fa:5.1f} s")
print(f"  confusion      {teer.conf:5.1f} s")
print(f"  TEER = {teer.ms:.0f}+{teer.fa:.0f}+{teer.conf:.0f} over {teer.total:.0f} s "
      f"of reference speech = {teer.rate:.2%}")

mapping = optimal_speaker_mapping(reference, hypothesis)
print()
print(f"Optimal speaker map: {mapping.mapping} ({mapping.overlap:.0f} s of overlap).")
print("X spends 20 s with B and only 5 s with A, so X becomes B; the")
print("[5, 10] stretch is then charged as confusion because the speech")
print("there belongs to A, whom nobody models.")

steer = compute_steer(reference, hypothesis)
print()
print(f"  sTEER = {steer.ms:.0f}+{steer.fa:.0f}+{steer.conf:.0f} over {steer.total:.0f} s "
      f"= {steer.rate:.2%}  (never below TEER)")

print()
print("Utterance-level view: each reference utterance takes the label of")
print("its maximal-overlap hypothesis turn.")
pairs = match_labels(reference, hypothesis)
report = classification_report(pairs)
for (truth, predicted), utterance in zip(pairs, reference):
    got = predicted.value if predicted else "nothing"
    print(f"  {utterance.speaker} [{utterance.start:.0f}, {utterance.end:.0f}] "
          f"{truth.value} -> predicted {got}")
print(f"  accuracy {report.accuracy:.2%}, macro F1 {report.macro_f1:.2f}, "
      f"weighted F1 {report.weighted_f1:.2f}")
