"""
Session output directory, layout version 1:

    final_document.md    Documentarian output (raw, also on parse failure)
    stories.md           the parsed stories in canonical markdown with the
                         placeholder index (absent on parse failure)
    requirements.jsonl   rule-mode decomposition of the parsed stories
    transcript.jsonl     one Message per line
    manifest.json        config snapshot, termination, status, timing
"""
import json
import logging
from pathlib import Path
from typing import List

from malea.errors import FormatError
from malea.models import Message, Transcript
from malea.stories.decompose import decompose_all
from malea.stories.emitter import emit_markdown
from malea.stories.export import export_requirements

logger = logging.getLogger(__name__)

LAYOUT_VERSION = 1
ARTIFACTS = ("final_document.md", "stories.md", "requirements.jsonl", "transcript.jsonl", "manifest.json")


def prepare_output_dir(out_dir, force: bool = False) -> Path:
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise FileExistsError(f"{out_dir} is not empty; pass --force to overwrite")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def write_transcript(transcript: Transcript, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for message in transcript.messages:
            f.write(json.dumps(message.to_record(), ensure_ascii=False) + "\n")
    return path


def read_transcript(path) -> List[Message]:
    path = Path(path)
    messages = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            messages.append(Message.from_record(json.loads(line)))
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError(path, line_no, f"malformed transcript record: {e}")
    return messages


def write_session(result, out_dir, force: bool = False) -> Path:
    out_dir = prepare_output_dir(out_dir, force)
    requirements = decompose_all(result.stories)

    (out_dir / "final_document.md").write_text(result.final_document, encoding="utf-8")
    if result.stories:
        metadata = {"title": result.title, "session_id": result.transcript.session_id, "status": result.status.value}
        (out_dir / "stories.md").write_text(emit_markdown(result.stories, metadata), encoding="utf-8")
    export_requirements(requirements, out_dir / "requirements.jsonl")
    write_transcript(result.transcript, out_dir / "transcript.jsonl")

    manifest = {
        "layout_version": LAYOUT_VERSION,
        "session_id": result.transcript.session_id,
        "mode": result.mode,
        "status": result.status.value,
        "termination": result.termination_summary(),
        "provider_calls": result.provider_calls,
        "qa_critiques_used": result.qa_critiques_used,
        "ea_critiques_used": result.ea_critiques_used,
        "stories": len(result.stories),
        "requirements": len(requirements),
        "placeholders": result.placeholder_count,
        "residue": [{"line": r.line_no, "text": r.text} for r in result.residue],
        "lint_annotations": list(result.lint_annotations),
        "config": result.transcript.config_snapshot,
        "started_at": result.started_at,
        "finished_at": result.finished_at,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n",
                                           encoding="utf-8")
    logger.info("Wrote session artifacts to %s", out_dir)
    return out_dir


def write_partial_transcript(transcript: Transcript, out_dir, force: bool = False) -> Path:
    out_dir = prepare_output_dir(out_dir, force)
    path = write_transcript(transcript, out_dir / "transcript.jsonl")
    logger.warning("Session aborted; partial transcript (%d messages) written to %s", len(transcript.messages), path)
    return path
