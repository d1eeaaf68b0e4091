"""
Ethical themes and their topics, loaded from the shipped YAML taxonomy.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import yaml

from malea.errors import ConfigError, FormatError

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"
DEFAULT_TAXONOMY_PATH = DATA_DIR / "taxonomy.yaml"


class Theme(str, Enum):
    TRANSPARENCY = "Transparency"
    FAIRNESS = "Fairness"
    DATA = "Data"


@dataclass(frozen=True)
class Topic:
    label: str
    keywords: Tuple[str, ...] = ()


@dataclass(frozen=True)
class EthicsTheme:
    theme: Theme
    topics: Tuple[Topic, ...]

    @property
    def name(self) -> str:
        return self.theme.value

    @property
    def topic_labels(self) -> Tuple[str, ...]:
        return tuple(t.label for t in self.topics)


def load_taxonomy(path) -> Tuple[EthicsTheme, ...]:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise FormatError(path, None, f"invalid YAML: {e}")
    if not isinstance(data, dict) or not isinstance(data.get("themes"), list):
        raise FormatError(path, None, "expected a top-level 'themes' list")

    themes = []
    seen_labels = set()
    for entry in data["themes"]:
        try:
            theme = Theme(entry["name"])
        except (KeyError, ValueError, TypeError):
            raise FormatError(path, None, f"unknown theme entry {entry!r}")
        topics = []
        for topic in entry.get("topics") or []:
            label = str(topic["label"]).strip()
            if label in seen_labels:
                raise FormatError(path, None, f"duplicate topic '{label}'")
            seen_labels.add(label)
            keywords = tuple(str(k).lower() for k in topic.get("keywords") or [])
            topics.append(Topic(label=label, keywords=keywords))
        themes.append(EthicsTheme(theme=theme, topics=tuple(topics)))

    logger.debug("Loaded taxonomy from %s: %d themes, %d topics", path, len(themes), len(seen_labels))
    return tuple(themes)


@lru_cache(maxsize=1)
def default_taxonomy() -> Tuple[EthicsTheme, ...]:
    themes = load_taxonomy(DEFAULT_TAXONOMY_PATH)
    topic_count = sum(len(t.topics) for t in themes)
    if len(themes) != 3 or topic_count != 12:
        raise FormatError(DEFAULT_TAXONOMY_PATH, None,
                          f"expected 3 themes and 12 topics, found {len(themes)} and {topic_count}")
    return themes


def all_topics(taxonomy: Sequence[EthicsTheme]) -> List[str]:
    return [topic.label for theme in taxonomy for topic in theme.topics]


def topic_keywords(taxonomy: Sequence[EthicsTheme]) -> Dict[str, Tuple[str, ...]]:
    return {topic.label: topic.keywords for theme in taxonomy for topic in theme.topics}


def select_themes(names: Sequence[str], taxonomy: Optional[Sequence[EthicsTheme]] = None) -> Tuple[EthicsTheme, ...]:
    """Pick themes by name, in the order given."""
    taxonomy = taxonomy or default_taxonomy()
    by_name = {t.name.lower(): t for t in taxonomy}
    selected = []
    for name in names:
        theme = by_name.get(str(name).strip().lower())
        if theme is None:
            raise ConfigError("themes", f"unknown theme '{name}'")
        selected.append(theme)
    if not selected:
        raise ConfigError("themes", "at least one theme is required")
    return tuple(selected)
