import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Sequence, Tuple

from malea.detectors.atomic_detector import detect_atomic
from malea.detectors.estimable_detector import detect_estimable
from malea.detectors.minimal_detector import detect_minimal
from malea.detectors.unambiguous_detector import detect_unambiguous
from malea.detectors.violation import QualityCriterion, Violation
from malea.errors import FormatError

logger = logging.getLogger(__name__)

DEFAULT_LEXICON_PATH = Path(__file__).resolve().parent.parent / "data" / "lexicon.txt"


def load_lexicon(path=None) -> Tuple[str, ...]:
    """One term per line; '#' starts a comment, blank lines are ignored."""
    if path is None:
        return _default_lexicon()
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise FormatError(path, None, f"cannot read lexicon: {e}")
    terms = []
    for line in lines:
        term = line.split("#", 1)[0].strip().lower()
        if term and term not in terms:
            terms.append(term)
    return tuple(terms)


@lru_cache(maxsize=1)
def _default_lexicon() -> Tuple[str, ...]:
    return load_lexicon(DEFAULT_LEXICON_PATH)


def lint(story, lexicon=None):
    lexicon = load_lexicon() if lexicon is None else lexicon
    violations = []
    violations += detect_atomic(story)
    violations += detect_minimal(story)
    violations += detect_unambiguous(story, lexicon)
    violations += detect_estimable(story)
    return violations


@dataclass(frozen=True)
class LintReport:
    by_criterion: Dict[QualityCriterion, int]
    by_story: Dict[str, Dict[QualityCriterion, int]]
    violations: Tuple[Violation, ...]

    @property
    def total(self) -> int:
        return sum(self.by_criterion.values())

    def render(self) -> str:
        lines = []
        for v in self.violations:
            where = f"{v.story_id}/{v.criterion_id}" if v.criterion_id else v.story_id
            lines.append(f"{where} [{v.criterion.value}] {v.rationale}: \"{v.excerpt}\"")
        summary = ", ".join(f"{c.value} {n}" for c, n in self.by_criterion.items())
        lines.append(f"{self.total} violation(s): {summary}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "by_criterion": {c.value: n for c, n in self.by_criterion.items()},
            "by_story": {s: {c.value: n for c, n in counts.items()} for s, counts in self.by_story.items()},
            "total": self.total,
            "violations": [v.to_dict() for v in self.violations],
        }


def lint_report(stories: Sequence, lexicon=None) -> LintReport:
    lexicon = load_lexicon() if lexicon is None else lexicon
    by_criterion = {c: 0 for c in QualityCriterion}
    by_story = {}
    violations = []
    for story in stories:
        found = lint(story, lexicon)
        counts = {c: 0 for c in QualityCriterion}
        for v in found:
            counts[v.criterion] += 1
            by_criterion[v.criterion] += 1
        by_story[story.id] = counts
        violations.extend(found)
    if violations:
        logger.debug("Lint: %d violation(s) over %d stories", len(violations), len(stories))
    return LintReport(by_criterion=by_criterion, by_story=by_story, violations=tuple(violations))
