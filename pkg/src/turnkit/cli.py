"""Command-line interface.

Subcommands: ``align`` (words + RTTM -> turn document), ``score``
(reference + hypothesis -> TEER/sTEER/classification report),
``fuse-demo`` (train the fusion classifier on synthetic or supplied
embeddings), and ``inspect`` (pretty-print a turn document).

Exit codes: 0 success, 2 usage or I/O problems, 3 invalid input data,
4 quality target missed.  Machine-readable results go to stdout or the
``-o`` file; progress and summaries go to stderr.

Every subcommand accepts ``--config FILE`` with a JSON object supplying
defaults for its flags; explicitly passed flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ingest
from .align import AlignConfig, attribute_words, flatten_stream, group_turns
from .errors import TrainingError, TurnkitError, ValidationError
from .fusion import (
    FusionConfig,
    make_toy_dataset,
    train_toy,
    write_checkpoint,
)
from .metrics import (
    build_score_report,
    classification_report,
    compute_steer,
    compute_teer,
    match_labels,
)
from .types import Emotion, LabeledInterval

_METRIC_NAMES = ("teer", "steer", "classification")


class _UsageError(Exception):
    """Bad invocation: unknown flag values, broken config file, and so on."""


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _write_output(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise _UsageError(f"config file {path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise _UsageError(f"config file {path}: expected a JSON object")
    return doc


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """Layer flag values over config-file values over built-in defaults."""
    file_values = _load_config_file(getattr(args, "config", None))
    unknown = sorted(set(file_values) - set(defaults))
    if unknown:
        raise _UsageError(f"config file has unknown keys: {', '.join(unknown)}")
    values = {**defaults, **file_values}
    for key in defaults:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    return values


def _require_path(values: dict, key: str, flag: str) -> Path:
    if not values[key]:
        raise _UsageError(f"missing required input: {flag}")
    return Path(values[key])


def _as_float(values: dict, key: str) -> float:
    try:
        return float(values[key])
    except (TypeError, ValueError):
        raise _UsageError(f"{key} must be a number, got {values[key]!r}") from None


def _as_int(values: dict, key: str) -> int:
    value = values[key]
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            if float(value) != int(value):
                raise ValueError
            value = int(value)
        except (TypeError, ValueError):
            raise _UsageError(f"{key} must be an integer, got {values[key]!r}") from None
    return value


# ---------------------------------------------------------------------------
# align


def _run_align(args: argparse.Namespace) -> int:
    values = _merge(
        args,
        {
            "words": None,
            "rttm": None,
            "output": None,
            "pause": 1.5,
            "rescue_window": 0.5,
            "keep_unattributed": False,
        },
    )
    pause = _as_float(values, "pause")
    rescue = _as_float(values, "rescue_window")
    if pause <= 0:
        raise _UsageError(f"--pause must be positive, got {pause}")
    if rescue < 0:
        raise _UsageError(f"--rescue-window must be non-negative, got {rescue}")
    words = ingest.parse_words(_require_path(values, "words", "--words"))
    segments = ingest.parse_rttm(_require_path(values, "rttm", "--rttm"))
    config = AlignConfig(
        pause_threshold=pause,
        rescue_window=rescue,
        drop_unattributed=not values["keep_unattributed"],
    )
    attributed = attribute_words(words, segments, config)
    stream = flatten_stream(attributed, config)
    dropped = len(attributed) - len(stream)
    turns = group_turns(stream, config)
    _write_output(ingest.write_turns(turns), values["output"])
    _diag(
        f"aligned {len(words)} words into {len(turns)} turns "
        f"({dropped} unattributed words dropped)"
    )
    return 0


# ---------------------------------------------------------------------------
# score


def _parse_metric_selection(raw: str) -> list[str]:
    names = [name.strip() for name in raw.split(",") if name.strip()]
    unknown = sorted(set(names) - set(_METRIC_NAMES))
    if unknown:
        raise _UsageError(
            f"unknown metric name(s): {', '.join(unknown)} "
            f"(choose from {', '.join(_METRIC_NAMES)})"
        )
    if not names:
        raise _UsageError("--metrics selected nothing")
    return names


def _run_score(args: argparse.Namespace) -> int:
    values = _merge(
        args,
        {
            "reference": None,
            "hypothesis": None,
            "output": None,
            "metrics": ",".join(_METRIC_NAMES),
        },
    )
    selected = _parse_metric_selection(values["metrics"])
    reference = ingest.parse_reference(_require_path(values, "reference", "--reference"))
    turns = ingest.parse_turns(_require_path(values, "hypothesis", "--hypothesis"))
    for i, turn in enumerate(turns):
        if turn.emotion is None:
            raise ValidationError(
                f"hypothesis turn {i} ([{turn.start}, {turn.end}] {turn.speaker}) "
                "has no emotion label, which the selected metrics require"
            )
    hypothesis = [
        LabeledInterval(start=t.start, end=t.end, speaker=t.speaker, emotion=t.emotion)
        for t in turns
    ]

    teer = compute_teer(reference, hypothesis) if "teer" in selected else None
    steer = compute_steer(reference, hypothesis) if "steer" in selected else None
    classification = (
        classification_report(match_labels(reference, turns))
        if "classification" in selected
        else None
    )
    report = build_score_report(teer=teer, steer=steer, classification=classification)
    _write_output(json.dumps(report, indent=2) + "\n", values["output"])

    if teer is not None:
        _diag(f"TEER {teer.rate * 100:.2f}%")
    if steer is not None:
        _diag(f"sTEER {steer.rate * 100:.2f}%")
    if classification is not None:
        _diag(f"accuracy {classification.accuracy * 100:.2f}%")
        _diag(f"weighted F1 {classification.weighted_f1:.2f}")
        _diag(f"macro F1 {classification.macro_f1:.2f}")
        _diag("F1 by emotion:")
        for emotion, m in classification.per_class.items():
            _diag(f"  {emotion.value:<8} {m.f1:.2f}")
    return 0


# ---------------------------------------------------------------------------
# fuse-demo


def _load_dataset_manifest(path: Path, config: FusionConfig) -> list:
    doc = ingest._as_record(ingest._load_json(path, "dataset manifest"), "dataset manifest")
    records = ingest._as_list(
        ingest._field(doc, "samples", "dataset manifest"), "samples", "dataset manifest"
    )
    base = path.parent
    samples = []
    for ri, rec in enumerate(records):
        where = f"dataset manifest sample {ri}"
        rec = ingest._as_record(rec, where)
        text = ingest.parse_embedding(
            base / ingest._as_string(ingest._field(rec, "text_embedding", where), "text_embedding", where)
        )
        audio = ingest.parse_embedding(
            base / ingest._as_string(ingest._field(rec, "audio_embedding", where), "audio_embedding", where)
        )
        label = Emotion.from_label(
            ingest._as_string(ingest._field(rec, "emotion", where), "emotion", where)
        )
        for name, matrix in (("text", text), ("audio", audio)):
            if matrix.shape[1] != config.d:
                raise ValidationError(
                    f"{where}: {name} embedding width {matrix.shape[1]} "
                    f"does not match model width {config.d}"
                )
        samples.append((text, audio, label))
    return samples


def _run_fuse_demo(args: argparse.Namespace) -> int:
    values = _merge(
        args,
        {
            "seed": 0,
            "d": 8,
            "heads": 1,
            "samples": 200,
            "steps": 500,
            "lr": 0.05,
            "separation": 4.0,
            "target": 0.95,
            "dataset": None,
            "checkpoint": None,
            "output": None,
        },
    )
    try:
        config = FusionConfig(
            d=_as_int(values, "d"), heads=_as_int(values, "heads"), seed=_as_int(values, "seed")
        )
    except ValidationError as exc:
        raise _UsageError(str(exc)) from None
    lr = _as_float(values, "lr")
    target = _as_float(values, "target")
    steps = _as_int(values, "steps")
    if steps < 1:
        raise _UsageError(f"--steps must be at least 1, got {steps}")

    if values["dataset"]:
        dataset = _load_dataset_manifest(Path(values["dataset"]), config)
    else:
        dataset = make_toy_dataset(
            _as_int(values, "samples"), config, separation=_as_float(values, "separation")
        )
    _diag(
        f"training fusion classifier: d={config.d} heads={config.heads} "
        f"seed={config.seed} samples={len(dataset)} lr={lr}"
    )
    result = train_toy(
        dataset, config, lr=lr, max_steps=steps, target_accuracy=target
    )
    if values["checkpoint"]:
        Path(values["checkpoint"]).write_text(
            write_checkpoint(result.params, config), encoding="utf-8"
        )
        _diag(f"checkpoint written to {values['checkpoint']}")

    final_accuracy = result.accuracies[-1]
    reached = final_accuracy >= target
    report = {
        "config": {
            "d": config.d,
            "heads": config.heads,
            "classes": config.classes,
            "ffn_multiplier": config.ffn_multiplier,
            "seed": config.seed,
        },
        "lr": lr,
        "samples": len(dataset),
        "steps": result.steps,
        "target_accuracy": target,
        "final_accuracy": final_accuracy,
        "reached_target": reached,
        "trace": [
            {"step": i, "loss": loss, "accuracy": accuracy}
            for i, (loss, accuracy) in enumerate(zip(result.losses, result.accuracies))
        ],
    }
    _write_output(json.dumps(report, indent=2) + "\n", values["output"])
    _diag(
        f"final training accuracy {final_accuracy * 100:.2f}% "
        f"after {result.steps} steps"
    )
    if not reached:
        _diag(f"accuracy target {target:.2f} missed")
        return 4
    return 0


# ---------------------------------------------------------------------------
# inspect


def _run_inspect(args: argparse.Namespace) -> int:
    values = _merge(args, {"turns": None})
    turns = ingest.parse_turns(_require_path(values, "turns", "--turns"))
    lines = []
    for t in turns:
        suffix = f"  ({t.emotion.value})" if t.emotion is not None else ""
        lines.append(f"[{t.start:9.3f} - {t.end:9.3f}] {t.speaker}: {t.text}{suffix}")
    sys.stdout.write("\n".join(lines) + ("\n" if lines else ""))
    _diag(f"{len(turns)} turns")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turnkit",
        description="Align diarized transcripts into turns, score emotion timelines, "
        "and train the fusion classifier.",
    )
    sub = parser.add_subparsers(dest="command")

    p_align = sub.add_parser("align", help="merge words and diarization into turns")
    p_align.add_argument("--words", help="word transcript document (JSON)")
    p_align.add_argument("--rttm", help="diarization segments (RTTM)")
    p_align.add_argument("--pause", type=float, help="pause threshold in seconds (default 1.5)")
    p_align.add_argument(
        "--rescue-window",
        dest="rescue_window",
        type=float,
        help="rescue window in seconds for zero-overlap words (default 0.5)",
    )
    p_align.add_argument(
        "--keep-unattributed",
        dest="keep_unattributed",
        action="store_true",
        default=None,
        help="keep words no segment claimed instead of dropping them",
    )
    p_align.add_argument("-o", "--output", help="output path (default stdout)")
    p_align.add_argument("--config", help="JSON config file with flag defaults")
    p_align.set_defaults(handler=_run_align)

    p_score = sub.add_parser("score", help="score a hypothesis against a reference")
    p_score.add_argument("--reference", help="reference annotation document (JSON)")
    p_score.add_argument("--hypothesis", help="hypothesis turn document (JSON)")
    p_score.add_argument(
        "--metrics",
        help="comma-separated subset of teer,steer,classification (default all)",
    )
    p_score.add_argument("-o", "--output", help="output path (default stdout)")
    p_score.add_argument("--config", help="JSON config file with flag defaults")
    p_score.set_defaults(handler=_run_score)

    p_demo = sub.add_parser("fuse-demo", help="train the fusion classifier")
    p_demo.add_argument("--seed", type=int, help="parameter and data seed (default 0)")
    p_demo.add_argument("--d", type=int, help="model width (default 8)")
    p_demo.add_argument("--heads", type=int, help="attention heads (default 1)")
    p_demo.add_argument("--samples", type=int, help="synthetic sample count (default 200)")
    p_demo.add_argument("--steps", type=int, help="maximum gradient steps (default 500)")
    p_demo.add_argument("--lr", type=float, help="learning rate (default 0.05)")
    p_demo.add_argument(
        "--separation", type=float, help="synthetic class separation (default 4.0)"
    )
    p_demo.add_argument("--target", type=float, help="accuracy target (default 0.95)")
    p_demo.add_argument(
        "--dataset",
        help="manifest of embedding files to train on instead of synthetic data",
    )
    p_demo.add_argument("--checkpoint", help="where to write the parameter checkpoint")
    p_demo.add_argument("-o", "--output", help="report output path (default stdout)")
    p_demo.add_argument("--config", help="JSON config file with flag defaults")
    p_demo.set_defaults(handler=_run_fuse_demo)

    p_inspect = sub.add_parser("inspect", help="pretty-print a turn document")
    p_inspect.add_argument("--turns", help="turn document (JSON)")
    p_inspect.add_argument("--config", help="JSON config file with flag defaults")
    p_inspect.set_defaults(handler=_run_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_usage(sys.stderr)
        _diag("error: a subcommand is required")
        return 2
    try:
        return args.handler(args)
    except _UsageError as exc:
        _diag(f"usage error: {exc}")
        return 2
    except OSError as exc:
        _diag(f"i/o error: {exc}")
        return 2
    except TrainingError as exc:
        _diag(f"training failed: {exc}")
        return 4
    except TurnkitError as exc:
        _diag(f"invalid input: {exc}")
        return 3


def entrypoint() -> None:
    sys.exit(main())
