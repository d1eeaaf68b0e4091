from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple


class QualityCriterion(str, Enum):
    ATOMIC = "Atomic"
    MINIMAL = "Minimal"
    UNAMBIGUOUS = "Unambiguous"
    ESTIMABLE = "Estimable"


@dataclass(frozen=True)
class Violation:
    criterion: QualityCriterion
    story_id: str
    span: Tuple[int, int]
    rationale: str
    text: str
    criterion_id: Optional[str] = None

    def __post_init__(self):
        start, end = self.span
        if not 0 <= start <= end <= len(self.text):
            raise ValueError(f"span {self.span} outside the cited text")

    @property
    def excerpt(self) -> str:
        return self.text[self.span[0]:self.span[1]]

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "story_id": self.story_id,
            "criterion_id": self.criterion_id,
            "span": list(self.span),
            "excerpt": self.excerpt,
            "rationale": self.rationale,
        }
