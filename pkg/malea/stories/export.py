"""
Requirements export: JSON lines, a header record then one record per
DiscreteRequirement. This is the file mapping records refer to.
"""
import json
import logging
from pathlib import Path
from typing import List, Sequence

from malea.errors import FormatError
from malea.models import DiscreteRequirement

logger = logging.getLogger(__name__)

REQUIREMENTS_HEADER = {"schema": "malea.requirements", "version": 1}


def requirement_record(requirement: DiscreteRequirement) -> dict:
    return {
        "id": requirement.id,
        "text": requirement.text,
        "story_id": requirement.source_story_id,
        "criterion_id": requirement.source_criterion_id,
        "placeholders": [p.description or "" for p in requirement.placeholders],
        "themes": list(requirement.themes),
    }


def dump_requirements(requirements: Sequence[DiscreteRequirement]) -> str:
    lines = [json.dumps(REQUIREMENTS_HEADER)]
    lines += [json.dumps(requirement_record(r), ensure_ascii=False) for r in requirements]
    return "\n".join(lines) + "\n"


def export_requirements(requirements: Sequence[DiscreteRequirement], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_requirements(requirements), encoding="utf-8")
    logger.info("Exported %d requirement(s) to %s", len(requirements), path)
    return path


def load_requirements(path) -> List[DiscreteRequirement]:
    path = Path(path)
    requirements = []
    seen = set()
    header_seen = False
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except ValueError as e:
            raise FormatError(path, line_no, f"invalid JSON: {e}")
        if not header_seen:
            if record.get("schema") != REQUIREMENTS_HEADER["schema"]:
                raise FormatError(path, line_no, "missing requirements header record")
            if record.get("version") != REQUIREMENTS_HEADER["version"]:
                raise FormatError(path, line_no, f"unsupported version {record.get('version')}")
            header_seen = True
            continue
        try:
            requirement = DiscreteRequirement(
                id=record["id"],
                text=record["text"],
                source_story_id=record["story_id"],
                source_criterion_id=record.get("criterion_id"),
                themes=tuple(record.get("themes") or ()),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(path, line_no, f"malformed requirement record: {e}")
        if requirement.id in seen:
            raise FormatError(path, line_no, f"duplicate requirement id {requirement.id}")
        seen.add(requirement.id)
        requirements.append(requirement)
    if not header_seen:
        raise FormatError(path, None, "empty file, no requirements header")
    return requirements
