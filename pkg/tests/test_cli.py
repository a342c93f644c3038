"""Command-line interface: exit codes, outputs, and config merging."""

import json
import subprocess
import sys

import pytest

WORDS_DOC = """\
{"segments": [{"words": [
  {"text": "Excuse", "start": 6.92, "end": 7.16},
  {"text": "me", "start": 7.30, "end": 7.37},
  {"text": "thanks", "start": 9.10, "end": 9.50}
]}]}
"""

RTTM_DOC = """\
SPEAKER rec 1 6.92 0.32 <NA> <NA> Speaker_00 <NA> <NA>
SPEAKER rec 1 9.00 0.80 <NA> <NA> Speaker_01 <NA> <NA>
"""

REFERENCE_DOC = """\
{"utterances": [
  {"start": 0.0, "end": 10.0, "speaker": "A", "emotion": "happy"}
]}
"""

HYPOTHESIS_DOC = """\
{"utterances": [
  {"start": 0.0, "end": 6.0, "speaker": "X", "emotion": "happy", "text": "fine"},
  {"start": 6.0, "end": 10.0, "speaker": "X", "emotion": "sad", "text": "not fine"}
]}
"""


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "turnkit", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=120,
    )


@pytest.fixture
def corpus(tmp_path):
    (tmp_path / "words.json").write_text(WORDS_DOC, encoding="utf-8")
    (tmp_path / "ref.rttm").write_text(RTTM_DOC, encoding="utf-8")
    (tmp_path / "reference.json").write_text(REFERENCE_DOC, encoding="utf-8")
    (tmp_path / "hypothesis.json").write_text(HYPOTHESIS_DOC, encoding="utf-8")
    return tmp_path


class TestAlignCommand:
    def test_success_writes_turns_and_reports_counts(self, corpus):
        result = run_cli(
            "align",
            "--words", str(corpus / "words.json"),
            "--rttm", str(corpus / "ref.rttm"),
            "--output", str(corpus / "turns.json"),
        )
        assert result.returncode == 0, result.stderr
        doc = json.loads((corpus / "turns.json").read_text())
        assert [u["text"] for u in doc["utterances"]] == ["Excuse me", "thanks"]
        assert [u["speaker"] for u in doc["utterances"]] == ["Speaker_00", "Speaker_01"]
        assert "aligned 3 words into 2 turns" in result.stderr

    def test_stdout_by_default(self, corpus):
        result = run_cli(
            "align", "--words", str(corpus / "words.json"), "--rttm", str(corpus / "ref.rttm")
        )
        assert result.returncode == 0
        assert json.loads(result.stdout)["utterances"]

    def test_missing_input_flag_is_usage_error(self, corpus):
        result = run_cli("align", "--rttm", str(corpus / "ref.rttm"))
        assert result.returncode == 2

    def test_nonexistent_file_is_io_error(self, corpus):
        result = run_cli(
            "align", "--words", str(corpus / "absent.json"), "--rttm", str(corpus / "ref.rttm")
        )
        assert result.returncode == 2

    def test_corrupt_words_document_is_validation_error(self, corpus):
        (corpus / "bad.json").write_text('{"segments": [', encoding="utf-8")
        result = run_cli(
            "align", "--words", str(corpus / "bad.json"), "--rttm", str(corpus / "ref.rttm")
        )
        assert result.returncode == 3
        assert "invalid input" in result.stderr

    def test_non_positive_pause_is_usage_error(self, corpus):
        result = run_cli(
            "align",
            "--words", str(corpus / "words.json"),
            "--rttm", str(corpus / "ref.rttm"),
            "--pause", "0",
        )
        assert result.returncode == 2

    def test_config_file_supplies_defaults_and_flags_win(self, corpus):
        (corpus / "tool.json").write_text(
            json.dumps({"pause": 0.1, "rescue_window": 0.5}), encoding="utf-8"
        )
        split = run_cli(
            "align",
            "--words", str(corpus / "words.json"),
            "--rttm", str(corpus / "ref.rttm"),
            "--config", str(corpus / "tool.json"),
        )
        assert split.returncode == 0
        # 0.1 s pause splits "Excuse" / "me"; an explicit flag restores the merge.
        assert len(json.loads(split.stdout)["utterances"]) == 3
        merged = run_cli(
            "align",
            "--words", str(corpus / "words.json"),
            "--rttm", str(corpus / "ref.rttm"),
            "--config", str(corpus / "tool.json"),
            "--pause", "1.5",
        )
        assert len(json.loads(merged.stdout)["utterances"]) == 2

    def test_unknown_config_key_is_usage_error(self, corpus):
        (corpus / "tool.json").write_text('{"pasue": 1.0}', encoding="utf-8")
        result = run_cli(
            "align",
            "--words", str(corpus / "words.json"),
            "--rttm", str(corpus / "ref.rttm"),
            "--config", str(corpus / "tool.json"),
        )
        assert result.returncode == 2


class TestScoreCommand:
    def test_success_reports_rates(self, corpus):
        result = run_cli(
            "score",
            "--reference", str(corpus / "reference.json"),
            "--hypothesis", str(corpus / "hypothesis.json"),
        )
        assert result.returncode == 0, result.stderr
        report = json.loads(result.stdout)
        assert report["teer"]["rate"] == pytest.approx(0.4)
        assert "TEER 40.00%" in result.stderr

    def test_metric_subset(self, corpus):
        result = run_cli(
            "score",
            "--reference", str(corpus / "reference.json"),
            "--hypothesis", str(corpus / "hypothesis.json"),
            "--metrics", "teer",
        )
        assert result.returncode == 0
        assert set(json.loads(result.stdout)) == {"teer"}

    def test_unknown_metric_is_usage_error(self, corpus):
        result = run_cli(
            "score",
            "--reference", str(corpus / "reference.json"),
            "--hypothesis", str(corpus / "hypothesis.json"),
            "--metrics", "wer",
        )
        assert result.returncode == 2

    def test_unlabeled_hypothesis_is_validation_error(self, corpus):
        (corpus / "nolabel.json").write_text(
            '{"utterances": [{"start": 0.0, "end": 10.0, "speaker": "X", "text": "hi"}]}',
            encoding="utf-8",
        )
        result = run_cli(
            "score",
            "--reference", str(corpus / "reference.json"),
            "--hypothesis", str(corpus / "nolabel.json"),
        )
        assert result.returncode == 3

    def test_empty_reference_is_validation_error(self, corpus):
        (corpus / "empty.json").write_text('{"utterances": []}', encoding="utf-8")
        result = run_cli(
            "score",
            "--reference", str(corpus / "empty.json"),
            "--hypothesis", str(corpus / "hypothesis.json"),
        )
        assert result.returncode == 3


class TestFuseDemoCommand:
    def test_reaches_target_and_writes_artifacts(self, corpus):
        result = run_cli(
            "fuse-demo",
            "--samples", "80",
            "--steps", "200",
            "--output", str(corpus / "report.json"),
            "--checkpoint", str(corpus / "ckpt.json"),
        )
        assert result.returncode == 0, result.stderr
        report = json.loads((corpus / "report.json").read_text())
        assert report["reached_target"]
        assert report["final_accuracy"] >= 0.95
        assert report["trace"][0]["step"] == 0
        checkpoint = json.loads((corpus / "ckpt.json").read_text())
        assert checkpoint["config"]["d"] == 8

    def test_unreachable_target_exits_4(self, corpus):
        result = run_cli(
            "fuse-demo", "--samples", "16", "--steps", "2", "--target", "0.999"
        )
        assert result.returncode == 4
        assert "accuracy target" in result.stderr

    def test_invalid_width_heads_combination_is_usage_error(self):
        result = run_cli("fuse-demo", "--d", "7", "--heads", "2", "--steps", "1")
        assert result.returncode == 2

    def test_zero_steps_is_usage_error(self):
        result = run_cli("fuse-demo", "--steps", "0")
        assert result.returncode == 2


class TestInspectCommand:
    def test_pretty_prints_turns(self, corpus):
        align_result = run_cli(
            "align",
            "--words", str(corpus / "words.json"),
            "--rttm", str(corpus / "ref.rttm"),
            "--output", str(corpus / "turns.json"),
        )
        assert align_result.returncode == 0
        result = run_cli("inspect", "--turns", str(corpus / "turns.json"))
        assert result.returncode == 0
        assert "Speaker_00: Excuse me" in result.stdout

    def test_corrupt_document_is_validation_error(self, corpus):
        (corpus / "bad.json").write_text("{", encoding="utf-8")
        result = run_cli("inspect", "--turns", str(corpus / "bad.json"))
        assert result.returncode == 3


class TestTopLevel:
    def test_no_subcommand_is_usage_error(self):
        result = run_cli()
        assert result.returncode == 2
        assert "usage" in (result.stderr + result.stdout).lower()

    def test_unknown_subcommand_is_usage_error(self):
        result = run_cli("frobnicate")
        assert result.returncode == 2

    def test_help_exits_zero(self):
        result = run_cli("--help")
        assert result.returncode == 0
        assert "align" in result.stdout
