"""
Tests for the command line: exit codes and the offline session flows.
"""
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from malea.cli import cli
from malea.providers import read_cassette
from tests.conftest import FIXTURES

DATA = Path(__file__).parent.parent / "malea" / "data"
CONFIG = DATA / "config.yaml"
FAKE_REVIEW = DATA / "cases" / "fake_review" / "description.md"
SSL = DATA / "cases" / "ssl" / "description.md"
SESSION_SCRIPT = DATA / "sessions" / "fake_review.yaml"
BASELINE_SCRIPT = DATA / "sessions" / "ssl_baseline.yaml"
BUNDLED_CASSETTE = DATA / "sessions" / "fake_review.cassette.jsonl"
BUNDLED_GOLDEN = DATA / "sessions" / "fake_review.transcript.jsonl"


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    # CliRunner swaps stderr per invocation; keep the root handler out of it
    monkeypatch.setattr("malea.cli.configure_logging", lambda level=None: None)


def _invoke(*args):
    return CliRunner().invoke(cli, [str(a) for a in args])


def test_eval_bundled_cases_with_pooled_recall():
    """eval over both MALEA sets prints the table and the pooled 81.08 % recall"""
    result = _invoke("eval", "--case", "ssl/malea", "--case", "fake_review/malea", "--aggregate")

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}: {result.output}"
    assert "Sign language translation" in result.output, "SSL row missing"
    assert "81.08 %" in result.output, f"Pooled recall missing from {result.output}"


def test_eval_json_output():
    """--json prints one record per row"""
    result = _invoke("eval", "--case", "fake_review/single_llm", "--json")

    payload = json.loads(result.output)
    assert payload["rows"][0]["tp"] == 9, f"Unexpected row {payload['rows'][0]}"


def test_eval_unknown_case_is_config_error():
    """Unknown bundled cases exit 2"""
    result = _invoke("eval", "--case", "chess/malea")
    assert result.exit_code == 2, f"Expected exit 2, got {result.exit_code}"


def test_eval_validation_failure(tmp_path):
    """A mapping naming an unknown gold id exits 6"""
    case = DATA / "cases" / "fake_review"
    mapping = tmp_path / "mapping.csv"
    mapping.write_text("gen_id,gold_id,relevant,shared,reviewed\nR-1.1,FR-99,true,,true\n", encoding="utf-8")

    result = _invoke("eval", "--gold", case / "gold.csv", "--mapping", mapping,
                     "--requirements", case / "malea" / "requirements.jsonl")

    assert result.exit_code == 6, f"Expected exit 6, got {result.exit_code}: {result.output}"
    assert "unknown_gold_id" in result.output, f"Finding not reported: {result.output}"


def test_eval_malformed_mapping(tmp_path):
    """A mapping without the expected header exits 5"""
    case = DATA / "cases" / "ssl"
    mapping = tmp_path / "mapping.csv"
    mapping.write_text("gen,gold\n", encoding="utf-8")

    result = _invoke("eval", "--gold", case / "gold.csv", "--mapping", mapping,
                     "--requirements", case / "malea" / "requirements.jsonl")
    assert result.exit_code == 5, f"Expected exit 5, got {result.exit_code}"


def test_lint_strict_exit_codes():
    """--strict exits 1 on violations and 0 on a clean document"""
    seeded = _invoke("lint", "--strict", FIXTURES / "lint" / "seeded.md")
    clean = _invoke("lint", "--strict", FIXTURES / "lint" / "clean.md")

    assert seeded.exit_code == 1, f"Expected exit 1, got {seeded.exit_code}"
    assert "20 violation(s)" in seeded.output, f"Summary missing: {seeded.output[-200:]}"
    assert clean.exit_code == 0, f"Expected exit 0, got {clean.exit_code}: {clean.output}"


def test_lint_without_strict_reports_but_succeeds():
    """Without --strict violations are informational"""
    result = _invoke("lint", "--json", FIXTURES / "lint" / "seeded.md")

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}"
    report = json.loads(result.output)
    assert list(report.values())[0]["total"] == 20, f"Unexpected total {report}"


def test_run_scripted_session(tmp_path, no_network):
    """A scripted session runs offline and writes its artifacts"""
    out_dir = tmp_path / "run"
    result = _invoke("run", FAKE_REVIEW, "--config", CONFIG, "--output", out_dir, "--script", SESSION_SCRIPT)

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}: {result.output}"
    assert "provider calls: 8" in result.output, f"Unexpected summary {result.output}"
    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["stories"] == 7, f"Expected 7 stories, got {manifest['stories']}"
    assert manifest["termination"] == {"QualityReview": "Approved", "EthicsReview": "Approved"}, \
        f"Unexpected termination {manifest['termination']}"


def test_run_refuses_non_empty_output(tmp_path):
    """Existing output without --force exits 7"""
    out_dir = tmp_path / "run"
    out_dir.mkdir()
    (out_dir / "keep.txt").write_text("x", encoding="utf-8")

    result = _invoke("run", FAKE_REVIEW, "--config", CONFIG, "--output", out_dir, "--script", SESSION_SCRIPT)
    assert result.exit_code == 7, f"Expected exit 7, got {result.exit_code}"


def test_run_rejects_credentials_in_config(tmp_path):
    """A config file carrying api_key exits 2"""
    config = tmp_path / "config.yaml"
    config.write_text("provider_endpoint: http://x\nmodel_name: m\napi_key: secret\n", encoding="utf-8")

    result = _invoke("run", FAKE_REVIEW, "--config", config, "--output", tmp_path / "run", "--script", SESSION_SCRIPT)
    assert result.exit_code == 2, f"Expected exit 2, got {result.exit_code}"


def test_run_without_api_key_is_config_error(tmp_path, monkeypatch):
    """A live run with no key in the environment exits 2 before any call"""
    monkeypatch.delenv("MALEA_API_KEY", raising=False)
    monkeypatch.setattr("malea.cli.load_dotenv", lambda *a, **k: False)

    result = _invoke("run", FAKE_REVIEW, "--config", CONFIG, "--output", tmp_path / "run")
    assert result.exit_code == 2, f"Expected exit 2, got {result.exit_code}: {result.output}"


def test_run_provider_failure_keeps_partial_transcript(tmp_path, no_network):
    """An exhausted script aborts the session with exit 4 and a partial transcript"""
    out_dir = tmp_path / "run"
    result = _invoke("run", SSL, "--config", CONFIG, "--output", out_dir, "--script", BASELINE_SCRIPT)

    assert result.exit_code == 4, f"Expected exit 4, got {result.exit_code}: {result.output}"
    assert (out_dir / "transcript.jsonl").exists(), "Partial transcript not written"
    assert not (out_dir / "manifest.json").exists(), "Aborted runs must not write a manifest"


def test_run_baseline(tmp_path, no_network):
    """--baseline makes one call and reports Completed"""
    out_dir = tmp_path / "baseline"
    result = _invoke("run", SSL, "--config", CONFIG, "--output", out_dir, "--script", BASELINE_SCRIPT, "--baseline")

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}: {result.output}"
    assert "Completed" in result.output, f"Unexpected status {result.output}"
    assert "stories: 5" in result.output, f"Expected 5 stories, got {result.output}"


def test_record_then_replay_matches_golden(tmp_path, no_network):
    """A recorded session replays offline to the identical transcript"""
    cassette = tmp_path / "session.cassette.jsonl"
    first = _invoke("run", FAKE_REVIEW, "--config", CONFIG, "--output", tmp_path / "live",
                    "--script", SESSION_SCRIPT, "--record", cassette)
    assert first.exit_code == 0, f"Recording run failed: {first.output}"

    golden = tmp_path / "live" / "transcript.jsonl"
    result = _invoke("replay", cassette, "--description", FAKE_REVIEW, "--config", CONFIG, "--golden", golden)

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}: {result.output}"
    assert "identical" in result.output, f"Unexpected replay output {result.output}"


def test_bundled_cassette_replays_to_golden(tmp_path, no_network):
    """The shipped cassette reproduces the shipped transcript and final document offline"""
    result = _invoke("replay", BUNDLED_CASSETTE, "--description", FAKE_REVIEW, "--config", CONFIG,
                     "--golden", BUNDLED_GOLDEN, "--output", tmp_path / "replayed")

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}: {result.output}"
    assert "Replayed 8 call(s): Approved" in result.output, f"Unexpected replay summary {result.output}"
    assert "identical" in result.output, f"Unexpected replay output {result.output}"
    golden_final = json.loads(BUNDLED_GOLDEN.read_text(encoding="utf-8").splitlines()[-1])["content"]
    replayed_final = (tmp_path / "replayed" / "final_document.md").read_text(encoding="utf-8")
    assert replayed_final == golden_final, "Replayed final document differs from the golden one"


def test_bundled_cassette_matches_a_fresh_recording(tmp_path, no_network):
    """Recording the scripted session again yields the request hashes of the shipped cassette"""
    cassette = tmp_path / "session.cassette.jsonl"
    _invoke("run", FAKE_REVIEW, "--config", CONFIG, "--output", tmp_path / "live",
            "--script", SESSION_SCRIPT, "--record", cassette)

    fresh = [e.request_hash for e in read_cassette(cassette)]
    bundled = [e.request_hash for e in read_cassette(BUNDLED_CASSETTE)]

    assert fresh == bundled, "Persona prompts or request layout changed; re-record the bundled cassette"


def test_replay_detects_a_changed_transcript(tmp_path, no_network):
    """A golden transcript that differs from the replay exits 1"""
    cassette = tmp_path / "session.cassette.jsonl"
    _invoke("run", FAKE_REVIEW, "--config", CONFIG, "--output", tmp_path / "live",
            "--script", SESSION_SCRIPT, "--record", cassette)
    lines = (tmp_path / "live" / "transcript.jsonl").read_text(encoding="utf-8").splitlines()
    last = json.loads(lines[-1])
    last["content"] += "\nEdited by hand."
    golden = tmp_path / "golden.jsonl"
    golden.write_text("\n".join(lines[:-1] + [json.dumps(last)]) + "\n", encoding="utf-8")

    result = _invoke("replay", cassette, "--description", FAKE_REVIEW, "--config", CONFIG, "--golden", golden)
    assert result.exit_code == 1, f"Expected exit 1, got {result.exit_code}: {result.output}"


def test_decompose_rule_mode(tmp_path):
    """decompose writes a requirements export and refuses to overwrite it"""
    output = tmp_path / "requirements.jsonl"
    first = _invoke("decompose", FIXTURES / "stories" / "headings.md", "--output", output)
    second = _invoke("decompose", FIXTURES / "stories" / "headings.md", "--output", output)

    assert first.exit_code == 0, f"Expected exit 0, got {first.exit_code}: {first.output}"
    assert "from 10 stories" in first.output, f"Unexpected summary {first.output}"
    assert second.exit_code == 7, f"Expected exit 7, got {second.exit_code}"


def test_decompose_llm_needs_config(tmp_path):
    """LLM decomposition without a config exits 2"""
    result = _invoke("decompose", FIXTURES / "stories" / "headings.md", "--output", tmp_path / "r.jsonl",
                     "--mode", "llm")
    assert result.exit_code == 2, f"Expected exit 2, got {result.exit_code}"


def test_coverage_of_bundled_requirements():
    """coverage prints topic counts for an exported requirement set"""
    result = _invoke("coverage", DATA / "cases" / "ssl" / "malea" / "requirements.jsonl", "--json")

    assert result.exit_code == 0, f"Expected exit 0, got {result.exit_code}: {result.output}"
    report = json.loads(result.output)
    assert sum(report["hits"].values()) > 0, f"No topic hits in {report}"


def test_replay_malformed_cassette_is_parse_error(tmp_path):
    """A broken cassette line exits 5 and names the file and line"""
    cassette = tmp_path / "broken.cassette.jsonl"
    cassette.write_text('{"schema": "malea.cassette", "version": 1}\nnot json\n', encoding="utf-8")

    result = _invoke("replay", cassette, "--description", FAKE_REVIEW, "--config", CONFIG)

    assert result.exit_code == 5, f"Expected exit 5, got {result.exit_code}: {result.output}"
    assert "broken.cassette.jsonl:2" in result.output, f"File and line missing from {result.output}"


def test_coverage_of_malformed_export_is_parse_error(tmp_path):
    """A requirements export without its header exits 5"""
    export = tmp_path / "requirements.jsonl"
    export.write_text('{"id": "R-1.1", "text": "A.", "story_id": "US-1"}\n', encoding="utf-8")

    result = _invoke("coverage", export)

    assert result.exit_code == 5, f"Expected exit 5, got {result.exit_code}: {result.output}"
