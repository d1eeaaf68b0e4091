"""
Parse agent text into user stories with acceptance criteria.

LLM formatting varies from run to run, so the parser accepts markdown
headings, bold markers, ordered and unordered bullets and "User Story N:"
labels. Lines it cannot place are returned as residue, never dropped.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from malea.models import AcceptanceCriterion, UserStory

logger = logging.getLogger(__name__)

STORY_RE = re.compile(
    r"^as\s+(?:(?:an?|the)\s+)?(?P<role>.+?),?\s+I\s+want\s+(?P<want>.+?)"
    r"(?:,?\s+so\s+that\s+(?P<benefit>.+?))?\s*$",
    re.IGNORECASE,
)
LEAD_RE = re.compile(
    r"^(?:#{1,6}\s*|[-*+•]\s+|\d+[.)]\s+)*"
    r"(?:(?:user\s+)?story\s*\d*\s*[:.)\-–]\s*|US-?\d+\s*[:.)\-–]\s*)?",
    re.IGNORECASE,
)
HEADING_RE = re.compile(r"^#{1,6}\s+\S")
RULE_RE = re.compile(r"^(?:-{3,}|\*{3,}|_{3,})\s*$")
CRITERIA_HEADING_RE = re.compile(r"^(?:#{1,6}\s*)?acceptance\s+criteria\s*[:\-–]?\s*(?P<rest>.*)$", re.IGNORECASE)
BULLET_RE = re.compile(r"^(?P<indent>\s*)(?:[-*+•]|\d+[.)]|[a-z][.)])\s+(?P<body>\S.*)$")
AC_LABEL_RE = re.compile(r"^AC[-\s]?\d+(?:\.\d+)?\s*[:.)\-–]\s*", re.IGNORECASE)
THEMES_RE = re.compile(r"^(?:themes?|topics?|tags?)\s*:\s*(?P<items>.+)$", re.IGNORECASE)
STORY_LABEL_ONLY_RE = re.compile(r"^(?:#{1,6}\s*)?(?:user\s+story|story|US-?)\s*\d+\s*[:.\-–]?.{0,120}$",
                                 re.IGNORECASE)
PLACEHOLDER_INDEX_RE = re.compile(r"^#{1,6}\s*placeholder\s+index", re.IGNORECASE)


@dataclass(frozen=True)
class ResidueLine:
    line_no: int
    text: str


@dataclass(frozen=True)
class ParseResult:
    stories: Tuple[UserStory, ...]
    residue: Tuple[ResidueLine, ...] = ()


@dataclass
class _Draft:
    role: str
    want: str
    benefit: Optional[str]
    criteria: List[str] = field(default_factory=list)
    themes: List[str] = field(default_factory=list)


def _strip_markup(line: str) -> str:
    return line.replace("**", "").replace("__", "").rstrip()


def _strip_terminal(text: str) -> str:
    text = text.strip()
    if text and text[-1] in ".;":
        text = text[:-1].rstrip()
    return text


def match_story(line: str):
    """Return (role, want, benefit) if the line is a story sentence."""
    candidate = LEAD_RE.sub("", line.strip(), count=1).strip()
    match = STORY_RE.match(candidate)
    if not match:
        return None
    role = match.group("role").strip().strip(",")
    want = match.group("want").strip()
    benefit = match.group("benefit")
    if benefit is not None:
        benefit = _strip_terminal(benefit)
    else:
        want = _strip_terminal(want)
    if not role or not want:
        return None
    return role, want, benefit


def _front_matter_end(lines: List[str]) -> int:
    if lines and lines[0].strip() == "---":
        for i in range(1, len(lines)):
            if lines[i].strip() == "---":
                return i + 1
    return 0


def parse_document(text: str) -> ParseResult:
    lines = text.splitlines()
    drafts: List[_Draft] = []
    residue: List[ResidueLine] = []
    current: Optional[_Draft] = None
    expect_criteria = False
    in_placeholder_index = False

    for index in range(_front_matter_end(lines), len(lines)):
        raw = _strip_markup(lines[index])
        line = raw.strip()
        line_no = index + 1
        if not line or RULE_RE.match(line):
            continue

        story = match_story(line)
        if story:
            current = _Draft(*story)
            drafts.append(current)
            expect_criteria = True
            in_placeholder_index = False
            continue

        if in_placeholder_index:
            continue
        if PLACEHOLDER_INDEX_RE.match(line):
            in_placeholder_index = True
            expect_criteria = False
            continue

        heading = CRITERIA_HEADING_RE.match(line)
        if heading and current is not None:
            expect_criteria = True
            rest = heading.group("rest").strip()
            if rest:
                current.criteria.append(AC_LABEL_RE.sub("", rest).strip())
            continue

        themes = THEMES_RE.match(line)
        if themes and current is not None:
            current.themes.extend(t.strip() for t in re.split(r"[,;]", themes.group("items")) if t.strip())
            continue

        if HEADING_RE.match(line) or STORY_LABEL_ONLY_RE.match(line):
            expect_criteria = False
            continue

        bullet = BULLET_RE.match(raw)
        labelled = AC_LABEL_RE.match(line)
        if current is not None and expect_criteria and (bullet or labelled):
            body = bullet.group("body") if bullet else line
            current.criteria.append(AC_LABEL_RE.sub("", body.strip()).strip())
            continue

        if current is not None and expect_criteria and current.criteria and raw[:1].isspace():
            current.criteria[-1] = f"{current.criteria[-1]} {line}"
            continue

        residue.append(ResidueLine(line_no, line))
        if current is not None and current.criteria:
            expect_criteria = False

    stories = []
    for n, draft in enumerate(drafts, start=1):
        criteria = tuple(
            AcceptanceCriterion(id=f"AC-{n}.{m}", text=text)
            for m, text in enumerate((c for c in draft.criteria if c), start=1)
        )
        stories.append(UserStory(
            id=f"US-{n}",
            role_clause=draft.role,
            want_clause=draft.want,
            benefit_clause=draft.benefit,
            criteria=criteria,
            themes=tuple(draft.themes),
        ))

    if residue:
        logger.info("Parsed %d stories; %d residue line(s) kept for review", len(stories), len(residue))
    return ParseResult(stories=tuple(stories), residue=tuple(residue))


def parse_stories(text: str) -> List[UserStory]:
    return list(parse_document(text).stories)
