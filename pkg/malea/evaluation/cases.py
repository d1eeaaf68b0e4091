"""Bundled case studies: malea/data/cases/<case>/{description.md, gold.csv, <set>/...}."""
from dataclasses import dataclass
from pathlib import Path
from typing import List

from malea.errors import ConfigError

CASES_DIR = Path(__file__).resolve().parent.parent / "data" / "cases"
SETS = ("single_llm", "malea")
SYSTEM_LABELS = {"fake_review": "Fake-review detection", "ssl": "Sign language translation"}
SET_LABELS = {"single_llm": "Single LLM", "malea": "MALEA"}


@dataclass(frozen=True)
class CaseFiles:
    case: str
    set_name: str
    description: Path
    gold: Path
    mapping: Path
    requirements: Path

    @property
    def system_label(self) -> str:
        return SYSTEM_LABELS.get(self.case, self.case)

    @property
    def set_label(self) -> str:
        return SET_LABELS.get(self.set_name, self.set_name)


def list_cases() -> List[str]:
    return sorted(p.name for p in CASES_DIR.iterdir() if (p / "gold.csv").exists())


def case_files(case_ref: str) -> CaseFiles:
    """Resolve "<case>/<set>", e.g. "ssl/malea"."""
    case, _, set_name = case_ref.partition("/")
    root = CASES_DIR / case
    if not (root / "gold.csv").exists():
        raise ConfigError("case", f"unknown case '{case}' (available: {', '.join(list_cases())})")
    if set_name not in SETS:
        raise ConfigError("case", f"unknown set '{set_name}' (available: {', '.join(SETS)})")
    return CaseFiles(
        case=case,
        set_name=set_name,
        description=root / "description.md",
        gold=root / "gold.csv",
        mapping=root / set_name / "mapping.csv",
        requirements=root / set_name / "requirements.jsonl",
    )
