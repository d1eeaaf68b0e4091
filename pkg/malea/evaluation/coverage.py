import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple

from malea.taxonomy import EthicsTheme, default_taxonomy, topic_keywords

UNCLASSIFIED = "unclassified"


@lru_cache(maxsize=1024)
def _keyword_pattern(keyword: str):
    return re.compile(r"(?<![\w-])" + re.escape(keyword) + r"(?![\w-])", re.IGNORECASE)


@dataclass(frozen=True)
class CoverageReport:
    hits: Dict[str, int]
    unclassified: Tuple[str, ...]

    @property
    def uncovered(self) -> Tuple[str, ...]:
        return tuple(topic for topic, count in self.hits.items() if count == 0)

    def to_dict(self) -> dict:
        return {"hits": dict(self.hits), UNCLASSIFIED: list(self.unclassified), "uncovered": list(self.uncovered)}

    def render(self) -> str:
        width = max(len(topic) for topic in self.hits) if self.hits else 10
        lines = [f"{topic:<{width}}  {count}" for topic, count in self.hits.items()]
        lines.append(f"{UNCLASSIFIED:<{width}}  {len(self.unclassified)}")
        if self.uncovered:
            lines.append("uncovered: " + ", ".join(self.uncovered))
        return "\n".join(lines)


def classify(text: str, keywords: Mapping[str, Sequence[str]]) -> Tuple[str, ...]:
    return tuple(topic for topic, words in keywords.items()
                 if any(_keyword_pattern(w).search(text) for w in words))


def theme_coverage(requirements, taxonomy: Optional[Sequence[EthicsTheme]] = None,
                   keywords: Optional[Mapping[str, Sequence[str]]] = None) -> CoverageReport:
    """
    Count requirements per taxonomy topic by keyword match. A requirement may
    hit several topics; one that hits none is listed as unclassified.
    """
    taxonomy = taxonomy or default_taxonomy()
    keywords = keywords or topic_keywords(taxonomy)
    hits = {topic: 0 for topic in keywords}
    unclassified = []
    for requirement in requirements:
        text = getattr(requirement, "text", requirement)
        topics = classify(text, keywords)
        for topic in topics:
            hits[topic] += 1
        if not topics:
            unclassified.append(getattr(requirement, "id", text))
    return CoverageReport(hits=hits, unclassified=tuple(unclassified))
