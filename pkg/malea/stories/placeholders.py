"""
Placeholder tags mark values that need stakeholder input:

    [PLACEHOLDER]
    [PLACEHOLDER: <description>]

The keyword is case-insensitive and the description is bracket-balanced, so
"[PLACEHOLDER: gap [in %] per group]" is one tag.
"""
import logging
import re
from typing import List, Tuple

from malea.models import Placeholder

logger = logging.getLogger(__name__)

_OPEN = re.compile(r"\[\s*placeholder\s*(?=[:\]])", re.IGNORECASE)


def scan_placeholders(text: str) -> Tuple[List[Placeholder], List[str]]:
    """Left-to-right scan; returns (placeholders, warnings for unterminated tags)."""
    placeholders = []
    warnings = []
    i = 0
    while True:
        match = _OPEN.search(text, i)
        if not match:
            break
        start = match.start()
        depth = 1
        j = match.end()
        while j < len(text) and depth:
            if text[j] == "[":
                depth += 1
            elif text[j] == "]":
                depth -= 1
            j += 1
        if depth:
            warnings.append(f"unterminated placeholder at offset {start}")
            i = start + 1
            continue

        inner = text[match.end():j - 1]
        description = inner[1:].strip() or None if inner.startswith(":") else None
        placeholders.append(Placeholder(raw_span=(start, j), description=description))
        i = j

    for warning in warnings:
        logger.warning("Placeholder scan: %s", warning)
    return placeholders, warnings


def extract_placeholders(text: str) -> List[Placeholder]:
    return scan_placeholders(text)[0]
