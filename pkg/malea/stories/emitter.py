"""
Canonical markdown rendering of a story set: renumbered US-n / AC-n.m ids and
a trailing placeholder index. Output always parses back to the same stories.
"""
from typing import List, Optional, Sequence

import yaml

from malea.models import UserStory
from malea.stories.placeholders import extract_placeholders


def placeholder_index(stories: Sequence[UserStory]) -> List[str]:
    entries = []
    for n, story in enumerate(stories, start=1):
        for placeholder in extract_placeholders(story.sentence):
            entries.append(f"US-{n}: {placeholder.description or '(no description)'}")
        for m, criterion in enumerate(story.criteria, start=1):
            for placeholder in criterion.placeholders:
                entries.append(f"US-{n} / AC-{n}.{m}: {placeholder.description or '(no description)'}")
    return entries


def emit_markdown(stories: Sequence[UserStory], metadata: Optional[dict] = None, final: bool = True) -> str:
    if final and not stories:
        raise ValueError("a final requirements document needs at least one story")
    metadata = dict(metadata or {})
    parts = []

    if metadata:
        parts.append("---\n" + yaml.safe_dump(metadata, sort_keys=False, allow_unicode=True) + "---\n")
    title = metadata.get("title")
    parts.append(f"# Ethics Requirements: {title}\n" if title else "# Ethics Requirements\n")

    for n, story in enumerate(stories, start=1):
        block = [f"## US-{n}", "", story.sentence, ""]
        if story.themes:
            block += [f"Themes: {', '.join(story.themes)}", ""]
        if story.criteria:
            block.append("**Acceptance Criteria:**")
            block.append("")
            for m, criterion in enumerate(story.criteria, start=1):
                block.append(f"- AC-{n}.{m}: {criterion.text}")
            block.append("")
        parts.append("\n".join(block))

    index = placeholder_index(stories)
    lines = ["## Placeholder Index", ""]
    lines += [f"- {entry}" for entry in index] if index else ["No placeholders."]
    parts.append("\n".join(lines) + "\n")
    return "\n".join(parts)
